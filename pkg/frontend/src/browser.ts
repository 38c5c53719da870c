/**
 * Repository browser: one collapsible lineage tree per root upload, built
 * client-side from the entry listing's parent links. Clicking an entry shows
 * its detail (summary, operations) fetched from the service. New job outputs
 * are appended live via addEntry — no reload.
 */

import { Api } from './api.js';
import type { EntryDetail, RepoEntry } from './types.js';

export class RepositoryBrowser {
  readonly root: HTMLElement;
  private treeHost!: HTMLElement;
  private detailHost!: HTMLElement;
  private entries: RepoEntry[] = [];

  constructor(container: HTMLElement, private readonly api: Api) {
    this.root = container;
    const doc = container.ownerDocument;
    container.textContent = '';
    this.treeHost = doc.createElement('div');
    this.treeHost.className = 'repo-tree';
    this.detailHost = doc.createElement('div');
    this.detailHost.className = 'repo-detail';
    container.append(this.treeHost, this.detailHost);
    this.renderTrees();
  }

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  setEntries(entries: RepoEntry[]): void {
    this.entries = [...entries];
    this.renderTrees();
  }

  /** Append one new entry (e.g. a job output) without refetching the listing. */
  addEntry(entry: RepoEntry): void {
    if (!this.entries.some((e) => e.entry_id === entry.entry_id)) {
      this.entries.push(entry);
    }
    this.renderTrees();
  }

  get entryIds(): string[] {
    return this.entries.map((e) => e.entry_id);
  }

  private childrenOf(parentId: string): RepoEntry[] {
    return this.entries.filter((e) => e.parent_ids.includes(parentId));
  }

  private renderEntry(entry: RepoEntry, seen: Set<string>): HTMLElement {
    const doc = this.doc;
    const children = seen.has(entry.entry_id) ? [] : this.childrenOf(entry.entry_id);
    seen.add(entry.entry_id);

    const label = doc.createElement('a');
    label.href = `#repo/${entry.entry_id}`;
    label.className = 'tree-entry';
    label.dataset.entryId = entry.entry_id;
    label.textContent = entry.technique
      ? `${entry.name} ← ${entry.technique}`
      : entry.name;
    label.title = `${entry.kind} · ${entry.entry_id} · ${entry.created_at}`;
    label.addEventListener('click', (ev) => {
      ev.preventDefault();
      void this.showDetail(entry.entry_id);
    });

    if (children.length === 0) {
      const leaf = doc.createElement('div');
      leaf.className = 'tree-leaf';
      leaf.appendChild(label);
      return leaf;
    }

    const details = doc.createElement('details');
    details.open = true;
    const summary = doc.createElement('summary');
    summary.appendChild(label);
    details.appendChild(summary);
    const kids = doc.createElement('div');
    kids.className = 'tree-children';
    for (const child of children) {
      kids.appendChild(this.renderEntry(child, seen));
    }
    details.appendChild(kids);
    return details;
  }

  private renderTrees(): void {
    this.treeHost.textContent = '';
    if (this.entries.length === 0) {
      const empty = this.doc.createElement('p');
      empty.className = 'empty-state';
      empty.textContent = 'No artifacts yet — upload an event log to get started.';
      this.treeHost.appendChild(empty);
      return;
    }
    const known = new Set(this.entries.map((e) => e.entry_id));
    // A root is an upload (no parents) or an entry whose parents were deleted
    // out of the listing; each gets its own collapsible tree.
    const roots = this.entries.filter(
      (e) => !e.parent_ids.some((p) => known.has(p)),
    );
    const seen = new Set<string>();
    for (const root of roots) {
      this.treeHost.appendChild(this.renderEntry(root, seen));
    }
  }

  async showDetail(entryId: string): Promise<void> {
    let detail: EntryDetail;
    try {
      detail = await this.api.showLog(entryId);
    } catch (err) {
      this.detailHost.textContent = err instanceof Error ? err.message : String(err);
      return;
    }
    const doc = this.doc;
    this.detailHost.textContent = '';

    const title = doc.createElement('h3');
    title.textContent = detail.name;
    const meta = doc.createElement('p');
    meta.className = 'detail-meta';
    meta.textContent = `${detail.kind} · ${detail.entry_id} · created ${detail.created_at}` +
      (detail.technique ? ` · produced by ${detail.technique}` : '');
    this.detailHost.append(title, meta);

    if (detail.summary) {
      const s = detail.summary;
      const facts = doc.createElement('p');
      facts.className = 'detail-summary';
      facts.textContent =
        `${s.traces} traces, ${s.events} events, ${s.variants} variants, ` +
        `${s.operation_records} operation records`;
      this.detailHost.appendChild(facts);
      if (s.operations.length > 0) {
        const ops = doc.createElement('ol');
        ops.className = 'detail-ops';
        for (const op of s.operations) {
          const li = doc.createElement('li');
          li.textContent = `${op.operation_kind} (${op.level}` +
            (op.target_attributes.length > 0 ? `: ${op.target_attributes.join(', ')}` : '') + ')';
          ops.appendChild(li);
        }
        this.detailHost.appendChild(ops);
      }
    }

    // Provenance chain straight from the service.
    try {
      const lineage = await this.api.lineage(entryId);
      if (lineage.edges.length > 0) {
        const caption = doc.createElement('h4');
        caption.textContent = 'Lineage';
        const list = doc.createElement('ul');
        list.className = 'lineage-edges';
        const names = new Map(lineage.nodes.map((n) => [n.entry_id, n]));
        for (const edge of lineage.edges) {
          const li = doc.createElement('li');
          const from = names.get(edge.from);
          const to = names.get(edge.to);
          li.textContent =
            `${from?.name ?? edge.from}${from?.deleted ? ' (deleted)' : ''}` +
            ` → [${edge.technique}] → ` +
            `${to?.name ?? edge.to}${to?.deleted ? ' (deleted)' : ''}`;
          list.appendChild(li);
        }
        this.detailHost.append(caption, list);
      }
    } catch {
      // lineage is best-effort display; the detail above already rendered
    }
  }
}
