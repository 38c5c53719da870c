/**
 * Run panel: pick a technique, fill its schema-driven form, submit the job,
 * poll until it settles, and show each run's result in its own output
 * section. Finished outputs are announced to the repository browser so it
 * updates without a reload.
 */

import { Api, ServiceError } from './api.js';
import { buildParamForm, showFieldErrors, validateForm, type FormValues } from './forms.js';
import type { EntryDetail, JobStatus, RepoEntry, RunnerSchema } from './types.js';

export interface PollOptions {
  /** Base delay between status checks; the design default is one second. */
  intervalMs?: number;
  /** Backoff ceiling when status checks themselves fail. */
  maxIntervalMs?: number;
  /** Give up after this many consecutive failed status checks. */
  maxConsecutiveFailures?: number;
  onUpdate?: (status: JobStatus) => void;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a job until it is done or failed. Checks immediately, then every
 * `intervalMs`; transient errors double the delay (up to `maxIntervalMs`)
 * and a success resets it.
 */
export async function pollJob(
  api: Api,
  jobId: string,
  opts: PollOptions = {},
): Promise<JobStatus> {
  const base = opts.intervalMs ?? 1000;
  const ceiling = opts.maxIntervalMs ?? 8000;
  const giveUp = opts.maxConsecutiveFailures ?? 5;

  let delay = base;
  let failures = 0;

  for (;;) {
    try {
      const status = await api.jobStatus(jobId);
      failures = 0;
      delay = base;
      opts.onUpdate?.(status);
      if (status.state === 'done' || status.state === 'failed') {
        return status;
      }
    } catch (err) {
      if (err instanceof ServiceError && err.status === 404) throw err;
      failures += 1;
      if (failures >= giveUp) throw err;
      delay = Math.min(delay * 2, ceiling);
    }
    await sleep(delay);
  }
}

export interface RunPanelOptions {
  pollIntervalMs?: number;
  /** Called with each output entry so the repository browser can append it live. */
  onOutput?: (entry: EntryDetail) => void;
}

function summaryBlock(doc: Document, detail: EntryDetail): HTMLElement {
  const wrap = doc.createElement('div');
  wrap.className = 'output-summary';

  const link = doc.createElement('a');
  link.className = 'entry-link';
  link.href = `#repo/${detail.entry_id}`;
  link.textContent = `${detail.name} (${detail.entry_id})`;
  wrap.appendChild(link);

  if (detail.summary) {
    const s = detail.summary;
    const facts = doc.createElement('p');
    facts.className = 'summary-facts';
    facts.textContent =
      `${s.traces} traces, ${s.events} events, ${s.variants} variants, ` +
      `${s.operation_records} operation records`;
    wrap.appendChild(facts);

    if (s.operations.length > 0) {
      const ops = doc.createElement('ol');
      ops.className = 'summary-ops';
      for (const op of s.operations) {
        const li = doc.createElement('li');
        li.textContent = `${op.operation_kind} at ${op.level} level` +
          (op.target_attributes.length > 0 ? ` on ${op.target_attributes.join(', ')}` : '');
        ops.appendChild(li);
      }
      wrap.appendChild(ops);
    }
  }
  return wrap;
}

export class RunPanel {
  readonly root: HTMLElement;
  private techniqueSelect!: HTMLSelectElement;
  private inputSelect!: HTMLSelectElement;
  private seedInput!: HTMLInputElement;
  private formContainer!: HTMLElement;
  private runButton!: HTMLButtonElement;
  private panelError!: HTMLElement;
  private outputs!: HTMLElement;
  private readValues: (() => FormValues) | null = null;
  private runners: Record<string, RunnerSchema> = {};

  constructor(
    container: HTMLElement,
    private readonly api: Api,
    private readonly options: RunPanelOptions = {},
  ) {
    this.root = container;
    this.render();
  }

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  private render(): void {
    const doc = this.doc;
    this.root.textContent = '';

    const controls = doc.createElement('div');
    controls.className = 'run-controls';

    this.techniqueSelect = doc.createElement('select');
    this.techniqueSelect.className = 'technique-select';
    this.techniqueSelect.addEventListener('change', () => this.onTechniqueChange());

    this.inputSelect = doc.createElement('select');
    this.inputSelect.className = 'input-select';
    this.inputSelect.addEventListener('change', () => this.revalidate());

    this.seedInput = doc.createElement('input');
    this.seedInput.type = 'number';
    this.seedInput.step = '1';
    this.seedInput.value = '0';
    this.seedInput.className = 'seed-input';
    this.seedInput.title = 'Seed for the technique’s randomness; reruns with the same seed reproduce the output.';

    const labelled = (text: string, el: HTMLElement) => {
      const wrap = doc.createElement('label');
      wrap.className = 'run-control';
      const span = doc.createElement('span');
      span.textContent = text;
      wrap.append(span, el);
      return wrap;
    };
    controls.append(
      labelled('Technique', this.techniqueSelect),
      labelled('Input log', this.inputSelect),
      labelled('Seed', this.seedInput),
    );

    this.formContainer = doc.createElement('div');
    this.formContainer.className = 'param-form';

    this.runButton = doc.createElement('button');
    this.runButton.className = 'run-button';
    this.runButton.textContent = 'Run';
    this.runButton.disabled = true;
    this.runButton.addEventListener('click', () => void this.submit());

    this.panelError = doc.createElement('div');
    this.panelError.className = 'panel-error';

    this.outputs = doc.createElement('div');
    this.outputs.className = 'output-sections';

    this.root.append(controls, this.formContainer, this.runButton, this.panelError, this.outputs);
  }

  /** Populate the technique dropdown from the service's runner schemas. */
  setRunners(runners: Record<string, RunnerSchema>, preselect?: string): void {
    this.runners = runners;
    this.techniqueSelect.textContent = '';
    const blank = this.doc.createElement('option');
    blank.value = '';
    blank.textContent = '(choose a technique)';
    this.techniqueSelect.appendChild(blank);
    for (const id of Object.keys(runners)) {
      const option = this.doc.createElement('option');
      option.value = id;
      option.textContent = id;
      option.title = runners[id].summary;
      this.techniqueSelect.appendChild(option);
    }
    if (preselect && preselect in runners) {
      this.techniqueSelect.value = preselect;
    }
    this.onTechniqueChange();
  }

  /** Limit the dropdown to runners of one signature group, e.g. "anon-ops". */
  focusTechniqueGroup(group: string): void {
    const ids = Object.keys(this.runners).filter(
      (id) => this.runners[id].technique === group,
    );
    if (ids.length > 0) {
      this.techniqueSelect.value = ids[0];
      this.onTechniqueChange();
    }
  }

  /** Refresh the input dropdown; only event logs are runnable inputs. */
  setEntries(entries: RepoEntry[]): void {
    const current = this.inputSelect.value;
    this.inputSelect.textContent = '';
    const blank = this.doc.createElement('option');
    blank.value = '';
    blank.textContent = '(choose an uploaded log)';
    this.inputSelect.appendChild(blank);
    for (const entry of entries.filter((e) => e.kind === 'xes')) {
      const option = this.doc.createElement('option');
      option.value = entry.entry_id;
      option.textContent = `${entry.name} (${entry.entry_id})`;
      this.inputSelect.appendChild(option);
    }
    if (current) this.inputSelect.value = current;
    this.revalidate();
  }

  private onTechniqueChange(): void {
    const id = this.techniqueSelect.value;
    this.formContainer.textContent = '';
    this.readValues = null;
    if (id && this.runners[id]) {
      this.readValues = buildParamForm(this.formContainer, this.runners[id], () =>
        this.revalidate(),
      );
    }
    this.revalidate();
  }

  /** Client-side validation gates the run button. */
  revalidate(): Record<string, string> {
    const id = this.techniqueSelect.value;
    if (!id || !this.readValues) {
      this.runButton.disabled = true;
      return {};
    }
    const result = validateForm(this.runners[id], this.readValues());
    showFieldErrors(this.formContainer, result.errors);
    this.runButton.disabled =
      Object.keys(result.errors).length > 0 || this.inputSelect.value === '';
    return result.errors;
  }

  private async submit(): Promise<void> {
    const id = this.techniqueSelect.value;
    if (!id || !this.readValues) return;
    const result = validateForm(this.runners[id], this.readValues());
    if (!result.params) {
      showFieldErrors(this.formContainer, result.errors);
      return;
    }
    this.panelError.textContent = '';

    const section = this.doc.createElement('section');
    section.className = 'output-section';
    const heading = this.doc.createElement('h3');
    heading.textContent = id;
    const status = this.doc.createElement('p');
    status.className = 'job-state';
    status.textContent = 'submitting…';
    section.append(heading, status);
    this.outputs.prepend(section);

    let job: JobStatus;
    try {
      job = await this.api.submitJob({
        technique: id,
        input: this.inputSelect.value,
        params: result.params,
        seed: Number(this.seedInput.value || '0'),
      });
    } catch (err) {
      section.remove();
      if (err instanceof ServiceError && err.status === 422) {
        // The service's per-parameter messages, verbatim, on the fields.
        const leftovers = showFieldErrors(this.formContainer, err.messages);
        this.panelError.textContent = Object.entries(leftovers)
          .map(([key, message]) => `${key}: ${message}`)
          .join('; ');
      } else {
        this.panelError.textContent = err instanceof Error ? err.message : String(err);
      }
      return;
    }

    status.textContent = `job ${job.job_id}: ${job.state}`;
    try {
      const final = await pollJob(this.api, job.job_id, {
        intervalMs: this.options.pollIntervalMs ?? 1000,
        onUpdate: (s) => {
          status.textContent = `job ${s.job_id}: ${s.state}`;
        },
      });
      if (final.state === 'failed') {
        status.textContent = `job ${final.job_id}: failed — ${final.error ?? 'unknown error'}`;
        section.classList.add('failed');
        return;
      }
      status.textContent = `job ${final.job_id}: done`;
      for (const outputId of final.outputs) {
        const detail = await this.api.showLog(outputId);
        section.appendChild(summaryBlock(this.doc, detail));
        this.options.onOutput?.(detail);
      }
    } catch (err) {
      status.textContent = `status polling failed: ${err instanceof Error ? err.message : String(err)}`;
      section.classList.add('failed');
    }
  }
}
