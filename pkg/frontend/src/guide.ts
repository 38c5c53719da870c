/**
 * The four-step guide's pure core: the dimension catalogue, the client-side
 * candidate filter (kept equal to the service's POST /guide by construction
 * and by the exhaustive equivalence test), and the wizard state machine.
 */

import type { DimensionName, GuideChoices, TechniqueSignature } from './types.js';

export interface DimensionSpec {
  name: DimensionName;
  title: string;
  question: string;
  choices: string[];
  hint: string;
}

/** Step i of the wizard asks for DIMENSIONS[i - 1]. */
export const DIMENSIONS: DimensionSpec[] = [
  {
    name: 'pmps',
    title: 'Mining perspective',
    question: 'Which process-mining perspective does your analysis take?',
    choices: ['control-flow', 'time', 'organizational', 'case-data'],
    hint: 'What the downstream analysis looks at: activity orderings, timing behaviour, who works together, or case payload attributes.',
  },
  {
    name: 'pmac',
    title: 'Mining activity',
    question: 'Which process-mining activity should the published data support?',
    choices: ['discovery', 'conformance', 'performance', 'role-mining'],
    hint: 'The technique must leave enough signal for this activity to still work on the anonymized data.',
  },
  {
    name: 'prps',
    title: 'Protected perspective',
    question: 'Whose privacy are you protecting?',
    choices: ['case', 'resource'],
    hint: 'Cases are the individuals the process is about (patients, customers); resources are the people executing activities.',
  },
  {
    name: 'prac',
    title: 'Privacy activity',
    question: 'What do you want to do about privacy right now?',
    choices: ['PPDP', 'PPPM', 'PrAn'],
    hint: 'PPDP publishes protected data, PPPM runs mining under protection, PrAn quantifies risk and utility without changing the log.',
  },
];

export const DIMENSION_NAMES: DimensionName[] = DIMENSIONS.map((d) => d.name);

/**
 * Techniques whose signature contains every chosen dimension value, in
 * registry order. An absent/null choice is a wildcard.
 */
export function candidateTechniques(
  signatures: TechniqueSignature[],
  choices: GuideChoices,
): string[] {
  return signatures
    .filter((sig) =>
      DIMENSION_NAMES.every((dim) => {
        const chosen = choices[dim];
        return chosen == null || sig[dim].includes(chosen);
      }),
    )
    .map((sig) => sig.technique_id);
}

export interface WizardState {
  /** 1-based step currently being asked. Stays at 4 once every step is answered. */
  step: number;
  choices: GuideChoices;
  /** True once all four dimensions have been answered (possibly with "no preference"). */
  complete: boolean;
}

export function wizardInit(): WizardState {
  return { step: 1, choices: {}, complete: false };
}

/**
 * Record a choice (null = no preference) for the given step. Revising an
 * earlier step clears every later step's choice, so the remaining choices
 * are always a prefix of the four dimensions.
 */
export function wizardChoose(
  state: WizardState,
  step: number,
  value: string | null,
): WizardState {
  if (step < 1 || step > DIMENSIONS.length) {
    throw new Error(`wizard step out of range: ${step}`);
  }
  const dim = DIMENSIONS[step - 1];
  if (value !== null && !dim.choices.includes(value)) {
    throw new Error(`unknown ${dim.name} choice: ${value}`);
  }
  const choices: GuideChoices = {};
  for (let i = 0; i < step - 1; i += 1) {
    const earlier = DIMENSIONS[i].name;
    if (earlier in state.choices) choices[earlier] = state.choices[earlier];
  }
  choices[dim.name] = value;
  return {
    step: Math.min(step + 1, DIMENSIONS.length),
    choices,
    complete: step === DIMENSIONS.length,
  };
}

/** Jump back to an earlier step without answering it yet (keeps its old choice cleared). */
export function wizardRevisit(state: WizardState, step: number): WizardState {
  if (step < 1 || step > DIMENSIONS.length) {
    throw new Error(`wizard step out of range: ${step}`);
  }
  const choices: GuideChoices = {};
  for (let i = 0; i < step - 1; i += 1) {
    const earlier = DIMENSIONS[i].name;
    if (earlier in state.choices) choices[earlier] = state.choices[earlier];
  }
  return { step, choices, complete: false };
}

/** Every (choice ∪ {no preference}) combination across the four dimensions. */
export function allChoiceCombinations(): GuideChoices[] {
  let combos: GuideChoices[] = [{}];
  for (const dim of DIMENSIONS) {
    const next: GuideChoices[] = [];
    for (const combo of combos) {
      for (const value of [null, ...dim.choices]) {
        next.push({ ...combo, [dim.name]: value });
      }
    }
    combos = next;
  }
  return combos;
}
