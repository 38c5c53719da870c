// Repository browser: collapsible lineage trees per root upload, live
// append of job outputs, and the detail pane's provenance chain.

import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { Api } from '../src/api.js';
import { RepositoryBrowser } from '../src/browser.js';
import { pollJob } from '../src/runner.js';
import type { EntryDetail } from '../src/types.js';
import { fix1Bytes, startService, uploadFix1, type ServiceHandle } from './helpers/service.js';

let service: ServiceHandle;
let api: Api;
let fix1Id: string;
let suppressedId: string;
let secondRootId: string;

beforeAll(async () => {
  service = await startService();
  api = new Api(service.baseUrl);
  fix1Id = await uploadFix1(service.baseUrl);
  secondRootId = await uploadFix1(service.baseUrl, 'other-root.xes'); // same bytes → same entry!
  const job = await api.submitJob({
    technique: 'anon-ops.suppress',
    input: fix1Id,
    params: { level: 'event', atoms: [['concept:name', '=', 'string', 'd']] },
  });
  suppressedId = (await pollJob(api, job.job_id, { intervalMs: 100 })).outputs[0];
});

afterAll(async () => {
  await service.stop();
});

function mounted(): RepositoryBrowser {
  const host = document.createElement('div');
  document.body.appendChild(host);
  return new RepositoryBrowser(host, api);
}

describe('repository browser', () => {
  it('shows an empty-state prompt without entries', () => {
    const browser = mounted();
    browser.setEntries([]);
    expect(browser.root.querySelector('.empty-state')!.textContent).toMatch(/upload/i);
    browser.root.remove();
  });

  it('content addressing folds identical uploads into one entry', () => {
    // storing the same bytes twice returned the original entry id
    expect(secondRootId).toBe(fix1Id);
  });

  it('renders one collapsible tree per root with children nested inside', async () => {
    const browser = mounted();
    browser.setEntries((await api.listLogs()).entries);

    // the upload is a root with a collapsible node
    const details = browser.root.querySelectorAll('details');
    expect(details.length).toBe(1);
    const rootLabel = details[0].querySelector<HTMLElement>('summary .tree-entry')!;
    expect(rootLabel.dataset.entryId).toBe(fix1Id);

    // the suppressed log hangs beneath it, labeled with its technique
    const child = details[0].querySelector<HTMLElement>(
      `.tree-children .tree-entry[data-entry-id="${suppressedId}"]`,
    )!;
    expect(child.textContent).toContain('anon-ops.suppress');
    browser.root.remove();
  });

  it('appends a job output live without refetching the listing', async () => {
    const browser = mounted();
    const listing = (await api.listLogs()).entries;
    browser.setEntries(listing.filter((e) => e.entry_id === fix1Id));
    expect(
      browser.root.querySelector(`.tree-entry[data-entry-id="${suppressedId}"]`),
    ).toBeNull();

    const detail: EntryDetail = await api.showLog(suppressedId);
    browser.addEntry(detail);
    expect(
      browser.root.querySelector(`.tree-entry[data-entry-id="${suppressedId}"]`),
    ).not.toBeNull();
    expect(browser.entryIds).toContain(suppressedId);
    browser.root.remove();
  });

  it('detail pane shows the summary and the lineage chain from the service', async () => {
    const browser = mounted();
    browser.setEntries((await api.listLogs()).entries);
    await browser.showDetail(suppressedId);

    const summary = browser.root.querySelector<HTMLElement>('.detail-summary')!;
    expect(summary.textContent).toContain('7 events');
    expect(summary.textContent).toContain('3 traces');

    const ops = browser.root.querySelector<HTMLElement>('.detail-ops')!;
    expect(ops.textContent).toContain('suppression (event: concept:name)');

    const lineage = browser.root.querySelector<HTMLElement>('.lineage-edges')!;
    expect(lineage.textContent).toContain('[anon-ops.suppress]');
    expect(lineage.textContent).toContain('fix1.xes');
    browser.root.remove();
  });

  it('a second distinct upload becomes its own root tree', async () => {
    // same log, different bytes: a trailing comment changes the content hash
    const original = new TextDecoder().decode(fix1Bytes());
    const variant = original.replace('</log>', '</log>\n<!-- copy -->');
    const entry = await api.upload('variant.xes', variant);
    expect(entry.entry_id).not.toBe(fix1Id);

    const browser = mounted();
    browser.setEntries((await api.listLogs()).entries);
    const roots = browser.root.querySelectorAll('.repo-tree > details, .repo-tree > .tree-leaf');
    expect(roots.length).toBe(2);
    browser.root.remove();
  });
});
