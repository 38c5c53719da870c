/**
 * Console shell: upload control, four tabs (Guide, Run, Dashboards,
 * Repository), and the wiring between them. Picking a technique in the
 * wizard opens the run panel on it; finished jobs feed the repository
 * browser and the dashboards' entry lists without a reload.
 */

import { Api } from './api.js';
import { RepositoryBrowser } from './browser.js';
import { Dashboards } from './dashboards.js';
import { RunPanel } from './runner.js';
import type { RepoEntry } from './types.js';
import { GuideWizard } from './wizard.js';

export interface Console {
  wizard: GuideWizard;
  runPanel: RunPanel;
  dashboards: Dashboards;
  browser: RepositoryBrowser;
  refreshEntries(): Promise<void>;
  showTab(name: TabName): void;
}

export type TabName = 'guide' | 'run' | 'dashboards' | 'repository';

const TABS: TabName[] = ['guide', 'run', 'dashboards', 'repository'];

export async function initConsole(root: HTMLElement, api: Api): Promise<Console> {
  const doc = root.ownerDocument;
  root.textContent = '';

  // --- chrome -----------------------------------------------------------------
  const topBar = doc.createElement('header');
  topBar.className = 'top-bar';
  const title = doc.createElement('h1');
  title.textContent = 'pc4pm console';

  const uploadLabel = doc.createElement('label');
  uploadLabel.className = 'upload-control';
  uploadLabel.textContent = 'Upload log ';
  const uploadInput = doc.createElement('input');
  uploadInput.type = 'file';
  uploadInput.accept = '.xes,.ela';
  uploadLabel.appendChild(uploadInput);
  const uploadStatus = doc.createElement('span');
  uploadStatus.className = 'upload-status';

  topBar.append(title, uploadLabel, uploadStatus);

  const nav = doc.createElement('nav');
  nav.className = 'tab-nav';
  const panes: Record<TabName, HTMLElement> = {} as Record<TabName, HTMLElement>;
  const buttons: Record<TabName, HTMLButtonElement> = {} as Record<TabName, HTMLButtonElement>;
  for (const name of TABS) {
    const button = doc.createElement('button');
    button.textContent = name[0].toUpperCase() + name.slice(1);
    button.dataset.tab = name;
    button.addEventListener('click', () => showTab(name));
    nav.appendChild(button);
    buttons[name] = button;

    const pane = doc.createElement('main');
    pane.className = `tab-pane tab-${name}`;
    pane.style.display = 'none';
    panes[name] = pane;
  }

  root.append(topBar, nav, panes.guide, panes.run, panes.dashboards, panes.repository);

  function showTab(name: TabName): void {
    for (const tab of TABS) {
      panes[tab].style.display = tab === name ? '' : 'none';
      buttons[tab].classList.toggle('active', tab === name);
    }
  }

  // --- components --------------------------------------------------------------
  const browser = new RepositoryBrowser(panes.repository, api);
  const dashboards = new Dashboards(panes.dashboards, api);
  const runPanel = new RunPanel(panes.run, api, {
    onOutput: (detail) => {
      browser.addEntry(detail);
      void refreshEntries();
    },
  });
  const wizard = new GuideWizard(panes.guide, api, {
    onPick: (techniqueId) => {
      if (techniqueId === 'privacy-analysis') {
        showTab('dashboards');
        return;
      }
      showTab('run');
      runPanel.focusTechniqueGroup(techniqueId);
    },
  });

  async function refreshEntries(): Promise<void> {
    let entries: RepoEntry[] = [];
    try {
      entries = (await api.listLogs()).entries;
    } catch {
      // keep the stale lists; the wizard banner reports unreachability
    }
    browser.setEntries(entries);
    runPanel.setEntries(entries);
    dashboards.setEntries(entries);
  }

  uploadInput.addEventListener('change', () => {
    const file = uploadInput.files?.[0];
    if (!file) return;
    uploadStatus.textContent = `uploading ${file.name}…`;
    file
      .arrayBuffer()
      .then((buf) => api.upload(file.name, buf))
      .then((entry) => {
        uploadStatus.textContent = `stored as ${entry.entry_id}`;
        return refreshEntries();
      })
      .catch((err) => {
        uploadStatus.textContent = err instanceof Error ? err.message : String(err);
      });
  });

  try {
    const { runners } = await api.techniques();
    runPanel.setRunners(runners);
  } catch {
    // wizard.init reports the outage; the run panel stays empty until retry
  }
  await wizard.init();
  await refreshEntries();
  showTab('guide');

  return { wizard, runPanel, dashboards, browser, refreshEntries, showTab };
}

// Boot automatically when loaded as the console page's module.
const host = typeof document !== 'undefined' ? document.getElementById('pc4pm-console') : null;
if (host) {
  const params = new URLSearchParams(window.location.search);
  const base = params.get('api') ?? '';
  void initConsole(host, new Api(base));
}
