/**
 * Schema-driven parameter forms for the run panel.
 *
 * Each runnable technique publishes its parameter schema (name, type,
 * bounds, choices, help text) via GET /techniques; the form is generated
 * from that schema, shows the help text as a tooltip, and validates values
 * client-side so the run button only arms when the form is coherent. The
 * service re-validates on submit; its messages are rendered verbatim into
 * the same per-field error slots.
 */

import type { ParameterSchema, RunnerSchema } from './types.js';

/** Raw form values: strings from text/select inputs, booleans from checkboxes. */
export type FormValues = Record<string, string | boolean>;

export interface ValidationResult {
  /** Present only when errors is empty: typed params ready for POST /jobs. */
  params?: Record<string, unknown>;
  errors: Record<string, string>;
}

function checkNumeric(
  spec: ParameterSchema,
  raw: string,
): { value?: number; error?: string } {
  const num = Number(raw);
  if (raw.trim() === '' || !Number.isFinite(num)) {
    return { error: `must be a ${spec.type === 'integer' ? 'whole number' : 'number'}` };
  }
  if (spec.type === 'integer' && !Number.isInteger(num)) {
    return { error: 'must be a whole number' };
  }
  if (spec.min !== undefined) {
    if (spec.exclusive_min ? num <= spec.min : num < spec.min) {
      const cmp = spec.exclusive_min ? 'greater than' : 'at least';
      return { error: `must be ${cmp} ${spec.min}` };
    }
  }
  if (spec.max !== undefined && num > spec.max) {
    return { error: `must be at most ${spec.max}` };
  }
  return { value: num };
}

function typedValue(
  spec: ParameterSchema,
  raw: string | boolean,
): { value?: unknown; error?: string } {
  switch (spec.type) {
    case 'boolean':
      return { value: raw === true || raw === 'true' };
    case 'integer':
    case 'real':
      return checkNumeric(spec, String(raw));
    case 'choice': {
      const text = String(raw);
      if (!spec.choices?.includes(text)) {
        return { error: `must be one of: ${(spec.choices ?? []).join(', ')}` };
      }
      return { value: text };
    }
    case 'list':
    case 'object': {
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(raw));
      } catch {
        return { error: `must be valid JSON (${spec.type === 'list' ? 'an array' : 'an object'})` };
      }
      if (spec.type === 'list' && !Array.isArray(parsed)) {
        return { error: 'must be a JSON array' };
      }
      if (spec.type === 'object' && (typeof parsed !== 'object' || parsed === null || Array.isArray(parsed))) {
        return { error: 'must be a JSON object' };
      }
      return { value: parsed };
    }
    default:
      return { value: String(raw) };
  }
}

function isBlank(raw: string | boolean | undefined): boolean {
  return raw === undefined || (typeof raw === 'string' && raw.trim() === '');
}

/**
 * Validate raw form values against the schema. Blank optional fields are
 * omitted from the result so the service applies its own defaults.
 */
export function validateForm(schema: RunnerSchema, values: FormValues): ValidationResult {
  const errors: Record<string, string> = {};
  const params: Record<string, unknown> = {};

  for (const spec of schema.parameters) {
    const raw = values[spec.name];
    if (spec.type !== 'boolean' && isBlank(raw)) {
      if (spec.required) errors[spec.name] = 'required';
      continue;
    }
    const { value, error } = typedValue(spec, raw as string | boolean);
    if (error !== undefined) {
      errors[spec.name] = error;
    } else if (spec.type !== 'boolean' || value === true) {
      // An unchecked box means "use the default"; checked sends true.
      params[spec.name] = value;
    }
  }

  return Object.keys(errors).length > 0 ? { errors } : { params, errors };
}

// ---------------------------------------------------------------------------
// DOM
// ---------------------------------------------------------------------------

function inputFor(spec: ParameterSchema, doc: Document): HTMLElement {
  if (spec.type === 'choice') {
    const select = doc.createElement('select');
    select.name = spec.name;
    const blank = doc.createElement('option');
    blank.value = '';
    blank.textContent = spec.default !== undefined ? `(default: ${spec.default})` : '(choose)';
    select.appendChild(blank);
    for (const choice of spec.choices ?? []) {
      const option = doc.createElement('option');
      option.value = choice;
      option.textContent = choice;
      select.appendChild(option);
    }
    return select;
  }
  if (spec.type === 'boolean') {
    const box = doc.createElement('input');
    box.type = 'checkbox';
    box.name = spec.name;
    if (spec.default === true) box.checked = true;
    return box;
  }
  if (spec.type === 'list' || spec.type === 'object') {
    const area = doc.createElement('textarea');
    area.name = spec.name;
    area.rows = 3;
    area.placeholder = spec.type === 'list' ? '[ ... ]' : '{ ... }';
    if (spec.default !== undefined) area.value = JSON.stringify(spec.default);
    return area;
  }
  const input = doc.createElement('input');
  input.type = spec.type === 'integer' || spec.type === 'real' ? 'number' : 'text';
  if (spec.type === 'integer') input.step = '1';
  input.name = spec.name;
  if (spec.default !== undefined) input.value = String(spec.default);
  return input;
}

/**
 * Render one labelled field per parameter into `container`. The help text
 * becomes both the native tooltip (title attribute) and a visible hint.
 * Returns a reader for the current raw values.
 */
export function buildParamForm(
  container: HTMLElement,
  schema: RunnerSchema,
  onInput: () => void,
): () => FormValues {
  const doc = container.ownerDocument;
  container.textContent = '';
  const widgets: Array<{ name: string; el: HTMLElement }> = [];

  for (const spec of schema.parameters) {
    const field = doc.createElement('div');
    field.className = 'param-field';
    field.dataset.param = spec.name;

    const label = doc.createElement('label');
    label.textContent = spec.required ? `${spec.name} *` : spec.name;
    label.title = spec.help;

    const widget = inputFor(spec, doc);
    widget.title = spec.help;
    widget.addEventListener('input', onInput);
    widget.addEventListener('change', onInput);

    const hint = doc.createElement('small');
    hint.className = 'param-help';
    hint.textContent = spec.help;

    const error = doc.createElement('span');
    error.className = 'field-error';
    error.dataset.field = spec.name;

    field.append(label, widget, hint, error);
    container.appendChild(field);
    widgets.push({ name: spec.name, el: widget });
  }

  return () => {
    const values: FormValues = {};
    for (const { name, el } of widgets) {
      if (el.tagName === 'INPUT' && (el as HTMLInputElement).type === 'checkbox') {
        values[name] = (el as HTMLInputElement).checked;
      } else {
        values[name] = (el as HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement).value;
      }
    }
    return values;
  };
}

/** Write one message per field into its inline slot; return unmatched messages. */
export function showFieldErrors(
  container: HTMLElement,
  messages: Record<string, string>,
): Record<string, string> {
  for (const slot of Array.from(container.querySelectorAll<HTMLElement>('.field-error'))) {
    slot.textContent = '';
  }
  const leftovers: Record<string, string> = {};
  for (const [key, message] of Object.entries(messages)) {
    // "atoms[0]" should land on the "atoms" field.
    const fieldName = key.split('[')[0];
    const slot = container.querySelector<HTMLElement>(
      `.field-error[data-field="${fieldName}"]`,
    );
    if (slot) {
      slot.textContent = slot.textContent ? `${slot.textContent}; ${message}` : message;
    } else {
      leftovers[key] = message;
    }
  }
  return leftovers;
}
