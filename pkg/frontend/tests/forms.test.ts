import { describe, expect, it } from 'vitest';
import { buildParamForm, showFieldErrors, validateForm } from '../src/forms.js';
import type { RunnerSchema } from '../src/types.js';

const schema: RunnerSchema = {
  technique: 'demo',
  summary: 'exercise every widget type',
  input_kinds: ['xes'],
  parameters: [
    { name: 'k', type: 'integer', help: 'group floor', required: true, min: 1 },
    { name: 'epsilon', type: 'real', help: 'privacy budget', required: true, min: 0, exclusive_min: true },
    { name: 'ratio', type: 'real', help: 'bounded', min: 0, max: 1 },
    { name: 'kind', type: 'choice', help: 'model', required: true, choices: ['set', 'multiset'] },
    { name: 'fast', type: 'boolean', help: 'skip checks', default: false },
    { name: 'atoms', type: 'list', help: 'selector atoms', default: [] },
    { name: 'mapping', type: 'object', help: 'value mapping' },
    { name: 'note', type: 'string', help: 'free text' },
  ],
};

const base = { k: '2', epsilon: '0.5', kind: 'set', atoms: '[]' };

describe('validateForm', () => {
  it('accepts a complete valid form and types the values', () => {
    const result = validateForm(schema, {
      ...base,
      ratio: '0.25',
      fast: true,
      mapping: '{"a":"b"}',
      note: 'hello',
    });
    expect(result.errors).toEqual({});
    expect(result.params).toEqual({
      k: 2,
      epsilon: 0.5,
      ratio: 0.25,
      kind: 'set',
      fast: true,
      atoms: [],
      mapping: { a: 'b' },
      note: 'hello',
    });
  });

  it('reports missing required fields', () => {
    const result = validateForm(schema, { epsilon: '1', kind: 'set' });
    expect(result.errors.k).toBe('required');
    expect(result.params).toBeUndefined();
  });

  it('omits blank optional fields so the service applies defaults', () => {
    const result = validateForm(schema, { ...base, ratio: '', note: '   ' });
    expect(result.errors).toEqual({});
    expect(result.params).not.toHaveProperty('ratio');
    expect(result.params).not.toHaveProperty('note');
    expect(result.params).not.toHaveProperty('mapping');
  });

  it('rejects fractional and non-numeric integers', () => {
    expect(validateForm(schema, { ...base, k: '2.5' }).errors.k).toMatch(/whole number/);
    expect(validateForm(schema, { ...base, k: 'many' }).errors.k).toMatch(/whole number/);
  });

  it('enforces the exclusive minimum on epsilon', () => {
    expect(validateForm(schema, { ...base, epsilon: '0' }).errors.epsilon).toBe(
      'must be greater than 0',
    );
    expect(validateForm(schema, { ...base, epsilon: '0.0001' }).errors.epsilon).toBeUndefined();
  });

  it('enforces inclusive bounds', () => {
    expect(validateForm(schema, { ...base, k: '0' }).errors.k).toBe('must be at least 1');
    expect(validateForm(schema, { ...base, ratio: '1.5' }).errors.ratio).toBe(
      'must be at most 1',
    );
    expect(validateForm(schema, { ...base, ratio: '1' }).errors.ratio).toBeUndefined();
  });

  it('rejects unknown choices', () => {
    expect(validateForm(schema, { ...base, kind: 'sequence' }).errors.kind).toMatch(/one of/);
  });

  it('parses list and object JSON and rejects shape mismatches', () => {
    expect(validateForm(schema, { ...base, atoms: '[["a","=","string","x"]]' }).params?.atoms)
      .toEqual([['a', '=', 'string', 'x']]);
    expect(validateForm(schema, { ...base, atoms: '{"a":1}' }).errors.atoms).toBe(
      'must be a JSON array',
    );
    expect(validateForm(schema, { ...base, atoms: 'nonsense' }).errors.atoms).toMatch(/valid JSON/);
    expect(validateForm(schema, { ...base, mapping: '[1]' }).errors.mapping).toBe(
      'must be a JSON object',
    );
  });

  it('sends a checked box as true and an unchecked one not at all', () => {
    expect(validateForm(schema, { ...base, fast: true }).params?.fast).toBe(true);
    expect(validateForm(schema, { ...base, fast: false }).params).not.toHaveProperty('fast');
  });
});

describe('buildParamForm', () => {
  it('renders a widget per parameter with the help text as tooltip and hint', () => {
    const host = document.createElement('div');
    document.body.appendChild(host);
    let pings = 0;
    const read = buildParamForm(host, schema, () => {
      pings += 1;
    });

    expect(host.querySelectorAll('.param-field')).toHaveLength(schema.parameters.length);
    const kField = host.querySelector<HTMLElement>('.param-field[data-param="k"]')!;
    expect(kField.querySelector('label')!.textContent).toBe('k *'); // required marker
    expect(kField.querySelector('input')!.title).toBe('group floor');
    expect(kField.querySelector('.param-help')!.textContent).toBe('group floor');

    const kindSelect = host.querySelector<HTMLSelectElement>(
      '.param-field[data-param="kind"] select',
    )!;
    expect(Array.from(kindSelect.options).map((o) => o.value)).toEqual(['', 'set', 'multiset']);

    const kInput = kField.querySelector('input')!;
    kInput.value = '4';
    kInput.dispatchEvent(new Event('input', { bubbles: true }));
    expect(pings).toBeGreaterThan(0);
    expect(read().k).toBe('4');

    const fastBox = host.querySelector<HTMLInputElement>(
      '.param-field[data-param="fast"] input',
    )!;
    fastBox.checked = true;
    expect(read().fast).toBe(true);
    host.remove();
  });

  it('routes indexed service messages to their base field and returns leftovers', () => {
    const host = document.createElement('div');
    document.body.appendChild(host);
    buildParamForm(host, schema, () => undefined);
    const leftovers = showFieldErrors(host, {
      'atoms[0]': 'unknown comparator',
      epsilon: 'must be positive',
      input: 'entry is not an event log',
    });
    expect(
      host.querySelector<HTMLElement>('.field-error[data-field="atoms"]')!.textContent,
    ).toBe('unknown comparator');
    expect(
      host.querySelector<HTMLElement>('.field-error[data-field="epsilon"]')!.textContent,
    ).toBe('must be positive');
    expect(leftovers).toEqual({ input: 'entry is not an event log' });

    // a later render clears earlier messages
    showFieldErrors(host, {});
    expect(
      host.querySelector<HTMLElement>('.field-error[data-field="atoms"]')!.textContent,
    ).toBe('');
    host.remove();
  });
});
