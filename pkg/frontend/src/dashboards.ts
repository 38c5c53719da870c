/**
 * Risk and utility dashboards.
 *
 * Every figure on screen is a service response field rendered verbatim (the
 * literal token from the JSON body, so "1.0" stays "1.0"); the console never
 * recomputes a privacy or utility number. The only client-side arithmetic is
 * the group-size histogram, which tallies how many cases share each reported
 * group size.
 */

import { Api, ServiceError } from './api.js';
import type { RepoEntry, RiskReport } from './types.js';
import type { VerbatimMap } from './verbatim.js';

const KNOWLEDGE_KINDS = ['set', 'multiset', 'subsequence'];

function metricRow(doc: Document, label: string, metric: string, token: string): HTMLElement {
  const row = doc.createElement('div');
  row.className = 'metric';
  const name = doc.createElement('span');
  name.className = 'metric-label';
  name.textContent = label;
  const value = doc.createElement('span');
  value.className = 'metric-value';
  value.dataset.metric = metric;
  value.textContent = token;
  row.append(name, value);
  return row;
}

function histogram(doc: Document, report: RiskReport): HTMLElement {
  const counts = new Map<number, number>();
  for (const size of Object.values(report.per_case_min_group)) {
    counts.set(size, (counts.get(size) ?? 0) + 1);
  }
  const wrap = doc.createElement('div');
  wrap.className = 'group-histogram';
  const title = doc.createElement('h4');
  title.textContent = 'Cases per matching-group size';
  wrap.appendChild(title);
  for (const size of [...counts.keys()].sort((a, b) => a - b)) {
    const row = doc.createElement('div');
    row.className = 'hist-row';
    row.dataset.groupSize = String(size);
    const label = doc.createElement('span');
    label.className = 'hist-label';
    label.textContent = `group size ${size}`;
    const bar = doc.createElement('span');
    bar.className = 'hist-bar';
    bar.style.width = `${counts.get(size)! * 2}em`;
    bar.textContent = String(counts.get(size));
    row.append(label, bar);
    wrap.appendChild(row);
  }
  return wrap;
}

export class Dashboards {
  readonly root: HTMLElement;
  private emptyState!: HTMLElement;
  private panels!: HTMLElement;
  private riskLog!: HTMLSelectElement;
  private riskKind!: HTMLSelectElement;
  private riskL!: HTMLInputElement;
  private riskResult!: HTMLElement;
  private utilOriginal!: HTMLSelectElement;
  private utilAnonymized!: HTMLSelectElement;
  private utilResult!: HTMLElement;

  constructor(container: HTMLElement, private readonly api: Api) {
    this.root = container;
    this.render();
  }

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  private render(): void {
    const doc = this.doc;
    this.root.textContent = '';

    this.emptyState = doc.createElement('p');
    this.emptyState.className = 'empty-state';
    this.emptyState.textContent =
      'The repository is empty — upload an event log to analyze its disclosure risk and utility.';

    this.panels = doc.createElement('div');
    this.panels.className = 'dashboard-panels';

    // --- risk ---------------------------------------------------------------
    const risk = doc.createElement('section');
    risk.className = 'risk-dashboard';
    const riskTitle = doc.createElement('h3');
    riskTitle.textContent = 'Disclosure risk';
    this.riskLog = doc.createElement('select');
    this.riskLog.className = 'risk-log';
    this.riskKind = doc.createElement('select');
    this.riskKind.className = 'risk-kind';
    for (const kind of KNOWLEDGE_KINDS) {
      const option = doc.createElement('option');
      option.value = kind;
      option.textContent = kind;
      this.riskKind.appendChild(option);
    }
    this.riskKind.title = 'Adversary background-knowledge model.';
    this.riskL = doc.createElement('input');
    this.riskL.type = 'number';
    this.riskL.step = '1';
    this.riskL.min = '1';
    this.riskL.value = '1';
    this.riskL.className = 'risk-l';
    this.riskL.title = 'Maximum number of activities the adversary knows.';
    const riskButton = doc.createElement('button');
    riskButton.className = 'risk-fetch';
    riskButton.textContent = 'Compute risk';
    riskButton.addEventListener('click', () => void this.fetchRisk());
    this.riskResult = doc.createElement('div');
    this.riskResult.className = 'risk-result';
    risk.append(riskTitle, this.riskLog, this.riskKind, this.riskL, riskButton, this.riskResult);

    // --- utility ------------------------------------------------------------
    const util = doc.createElement('section');
    util.className = 'utility-dashboard';
    const utilTitle = doc.createElement('h3');
    utilTitle.textContent = 'Data utility (original vs anonymized)';
    this.utilOriginal = doc.createElement('select');
    this.utilOriginal.className = 'utility-original';
    this.utilAnonymized = doc.createElement('select');
    this.utilAnonymized.className = 'utility-anonymized';
    const utilButton = doc.createElement('button');
    utilButton.className = 'utility-fetch';
    utilButton.textContent = 'Compute utility';
    utilButton.addEventListener('click', () => void this.fetchUtility());
    this.utilResult = doc.createElement('div');
    this.utilResult.className = 'utility-result';
    util.append(utilTitle, this.utilOriginal, this.utilAnonymized, utilButton, this.utilResult);

    this.panels.append(risk, util);
    this.root.append(this.emptyState, this.panels);
    this.setEntries([]);
  }

  /** Offer only event logs; an empty repository shows the upload prompt instead. */
  setEntries(entries: RepoEntry[]): void {
    const logs = entries.filter((e) => e.kind === 'xes');
    const fill = (select: HTMLSelectElement) => {
      const current = select.value;
      select.textContent = '';
      for (const entry of logs) {
        const option = this.doc.createElement('option');
        option.value = entry.entry_id;
        option.textContent = `${entry.name} (${entry.entry_id})`;
        select.appendChild(option);
      }
      if (current) select.value = current;
    };
    fill(this.riskLog);
    fill(this.utilOriginal);
    fill(this.utilAnonymized);
    const empty = logs.length === 0;
    this.emptyState.style.display = empty ? '' : 'none';
    this.panels.style.display = empty ? 'none' : '';
  }

  private showError(target: HTMLElement, err: unknown): void {
    const p = this.doc.createElement('p');
    p.className = 'dashboard-error';
    if (err instanceof ServiceError) {
      p.textContent = Object.entries(err.messages)
        .map(([key, message]) => `${key}: ${message}`)
        .join('; ') || err.detail;
    } else {
      p.textContent = err instanceof Error ? err.message : String(err);
    }
    target.textContent = '';
    target.appendChild(p);
  }

  async fetchRisk(): Promise<void> {
    try {
      const { report, tokens } = await this.api.risk(
        this.riskLog.value,
        this.riskKind.value,
        Number(this.riskL.value),
      );
      this.renderRisk(report, tokens);
    } catch (err) {
      this.showError(this.riskResult, err);
    }
  }

  renderRisk(report: RiskReport, tokens: VerbatimMap): void {
    const doc = this.doc;
    this.riskResult.textContent = '';
    this.riskResult.append(
      metricRow(doc, 'uniqueness rate', 'uniqueness_rate', tokens['uniqueness_rate']),
      metricRow(
        doc,
        'avg re-identification probability',
        'avg_reid_probability',
        tokens['avg_reid_probability'],
      ),
    );

    const table = doc.createElement('table');
    table.className = 'per-case';
    const head = doc.createElement('tr');
    for (const text of ['case', 'matching-group size']) {
      const th = doc.createElement('th');
      th.textContent = text;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const caseId of Object.keys(report.per_case_min_group)) {
      const row = doc.createElement('tr');
      const name = doc.createElement('td');
      name.textContent = caseId;
      const size = doc.createElement('td');
      size.dataset.case = caseId;
      size.textContent = tokens[`per_case_min_group.${caseId}`];
      row.append(name, size);
      table.appendChild(row);
    }
    this.riskResult.append(table, histogram(doc, report));
  }

  async fetchUtility(): Promise<void> {
    try {
      const { tokens } = await this.api.utility(
        this.utilOriginal.value,
        this.utilAnonymized.value,
      );
      this.renderUtility(tokens);
    } catch (err) {
      this.showError(this.utilResult, err);
    }
  }

  renderUtility(tokens: VerbatimMap): void {
    const doc = this.doc;
    this.utilResult.textContent = '';
    const row = doc.createElement('div');
    row.className = 'utility-metrics';
    row.append(
      metricRow(doc, 'variant preservation', 'variant_preservation', tokens['variant_preservation']),
      metricRow(doc, 'directly-follows distance', 'df_distance', tokens['df_distance']),
      metricRow(doc, 'event count ratio', 'event_count_ratio', tokens['event_count_ratio']),
    );
    this.utilResult.appendChild(row);
  }
}
