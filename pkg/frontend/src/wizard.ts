/**
 * Four-step guide wizard. Candidates are computed client-side from the
 * technique signatures for instant feedback and refreshed from POST /guide
 * on every answer — the two always agree (the test suite proves it for every
 * choice combination). If the service is unreachable a banner appears and
 * the local list stands until the next successful refresh.
 */

import { Api } from './api.js';
import {
  DIMENSIONS,
  candidateTechniques,
  wizardChoose,
  wizardInit,
  wizardRevisit,
  type WizardState,
} from './guide.js';
import type { TechniqueSignature } from './types.js';

export interface WizardCallbacks {
  /** Called when the analyst picks one technique after finishing the guide. */
  onPick?: (techniqueId: string) => void;
}

export class GuideWizard {
  readonly root: HTMLElement;
  state: WizardState = wizardInit();
  /** The latest candidate list (client-computed, confirmed by POST /guide). */
  candidates: string[] = [];
  private signatures: TechniqueSignature[] = [];
  private banner!: HTMLElement;
  private indicator!: HTMLElement;
  private stepHost!: HTMLElement;
  private candidateHost!: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly api: Api,
    private readonly callbacks: WizardCallbacks = {},
  ) {
    this.root = container;
    const doc = container.ownerDocument;
    container.textContent = '';
    this.banner = doc.createElement('div');
    this.banner.className = 'wizard-banner';
    this.indicator = doc.createElement('div');
    this.indicator.className = 'wizard-indicator';
    this.stepHost = doc.createElement('div');
    this.stepHost.className = 'wizard-step-host';
    this.candidateHost = doc.createElement('div');
    this.candidateHost.className = 'wizard-candidates';
    container.append(this.banner, this.indicator, this.stepHost, this.candidateHost);
  }

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  async init(): Promise<void> {
    try {
      const response = await this.api.techniques();
      this.signatures = response.techniques;
      this.banner.textContent = '';
    } catch (err) {
      this.banner.textContent =
        `service unreachable: ${err instanceof Error ? err.message : String(err)}`;
      this.signatures = [];
    }
    this.candidates = candidateTechniques(this.signatures, this.state.choices);
    this.renderAll();
  }

  /** Answer `step` with `value` (null = no preference) and refresh candidates. */
  async choose(step: number, value: string | null): Promise<void> {
    this.state = wizardChoose(this.state, step, value);
    await this.refreshCandidates();
    this.renderAll();
  }

  /** Go back to an earlier step; its choice and all later ones are cleared. */
  async revisit(step: number): Promise<void> {
    this.state = wizardRevisit(this.state, step);
    await this.refreshCandidates();
    this.renderAll();
  }

  private async refreshCandidates(): Promise<void> {
    // Instant local answer first...
    this.candidates = candidateTechniques(this.signatures, this.state.choices);
    // ...then the service's, which is authoritative.
    try {
      const response = await this.api.guide(this.state.choices);
      this.candidates = response.techniques;
      this.banner.textContent = '';
    } catch (err) {
      this.banner.textContent =
        `service unreachable: ${err instanceof Error ? err.message : String(err)}`;
    }
  }

  private renderAll(): void {
    this.renderIndicator();
    this.renderStep();
    this.renderCandidates();
  }

  private renderIndicator(): void {
    const doc = this.doc;
    this.indicator.textContent = '';
    DIMENSIONS.forEach((dim, i) => {
      const step = i + 1;
      const seg = doc.createElement('button');
      seg.className = 'wizard-segment';
      const chosen = this.state.choices[dim.name];
      const answered = dim.name in this.state.choices;
      seg.classList.toggle('current', step === this.state.step && !this.state.complete);
      seg.classList.toggle('answered', answered);
      seg.dataset.step = String(step);
      seg.textContent = answered
        ? `${step}. ${dim.title}: ${chosen ?? 'no preference'}`
        : `${step}. ${dim.title}`;
      seg.addEventListener('click', () => void this.revisit(step));
      this.indicator.appendChild(seg);
    });
  }

  private renderStep(): void {
    const doc = this.doc;
    this.stepHost.textContent = '';
    if (this.state.complete) {
      const done = doc.createElement('p');
      done.className = 'wizard-done';
      done.textContent =
        this.candidates.length === 1
          ? 'One technique fits your answers — pick it below to open the run panel.'
          : 'These techniques fit your answers. Pick one to open the run panel.';
      this.stepHost.appendChild(done);
      return;
    }
    const dim = DIMENSIONS[this.state.step - 1];
    const question = doc.createElement('h3');
    question.className = 'wizard-question';
    question.textContent = `Step ${this.state.step} of ${DIMENSIONS.length}: ${dim.question}`;
    const hint = doc.createElement('p');
    hint.className = 'wizard-hint';
    hint.textContent = dim.hint;
    const options = doc.createElement('div');
    options.className = 'wizard-options';
    for (const value of [...dim.choices, null]) {
      const button = doc.createElement('button');
      button.className = 'wizard-option';
      button.dataset.value = value ?? '';
      button.textContent = value ?? 'No preference';
      button.addEventListener('click', () => void this.choose(this.state.step, value));
      options.appendChild(button);
    }
    this.stepHost.append(question, hint, options);
  }

  private renderCandidates(): void {
    const doc = this.doc;
    this.candidateHost.textContent = '';
    const title = doc.createElement('h4');
    title.textContent = `Matching techniques (${this.candidates.length})`;
    this.candidateHost.appendChild(title);
    const list = doc.createElement('ul');
    list.className = 'candidate-list';
    for (const id of this.candidates) {
      const item = doc.createElement('li');
      item.dataset.technique = id;
      const signature = this.signatures.find((s) => s.technique_id === id);
      if (this.state.complete) {
        const pick = doc.createElement('button');
        pick.className = 'candidate-pick';
        pick.textContent = id;
        pick.title = signature?.summary ?? '';
        pick.addEventListener('click', () => this.callbacks.onPick?.(id));
        item.appendChild(pick);
      } else {
        item.textContent = id;
        item.title = signature?.summary ?? '';
      }
      list.appendChild(item);
    }
    if (this.candidates.length === 0) {
      const none = doc.createElement('li');
      none.className = 'no-candidates';
      none.textContent = 'No technique matches this combination — revise a step above.';
      list.appendChild(none);
    }
    this.candidateHost.appendChild(list);
  }
}
