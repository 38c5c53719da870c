/**
 * Extract the literal number tokens from a JSON document.
 *
 * The dashboards must show every figure exactly as the service wrote it.
 * Parsing the body and re-stringifying would silently reformat numbers
 * (`1.0` becomes `"1"`, for instance), so instead we walk the raw text once
 * and record, for every primitive value, the exact source substring keyed by
 * its dotted path ("uniqueness_rate", "per_case_min_group.c3", "items.0").
 */

export type VerbatimMap = Record<string, string>;

class Scanner {
  pos = 0;
  constructor(readonly text: string) {}

  skipWs(): void {
    while (this.pos < this.text.length && ' \t\n\r'.includes(this.text[this.pos])) {
      this.pos += 1;
    }
  }

  peek(): string {
    return this.text[this.pos];
  }

  expect(ch: string): void {
    if (this.text[this.pos] !== ch) {
      throw new Error(`malformed JSON at offset ${this.pos}: expected ${ch!}`);
    }
    this.pos += 1;
  }
}

function scanString(s: Scanner): string {
  s.expect('"');
  let out = '';
  while (s.pos < s.text.length) {
    const ch = s.text[s.pos];
    if (ch === '"') {
      s.pos += 1;
      return out;
    }
    if (ch === '\\') {
      const esc = s.text[s.pos + 1];
      if (esc === 'u') {
        out += String.fromCharCode(parseInt(s.text.slice(s.pos + 2, s.pos + 6), 16));
        s.pos += 6;
      } else {
        const simple: Record<string, string> = {
          '"': '"', '\\': '\\', '/': '/', b: '\b', f: '\f', n: '\n', r: '\r', t: '\t',
        };
        out += simple[esc] ?? esc;
        s.pos += 2;
      }
    } else {
      out += ch;
      s.pos += 1;
    }
  }
  throw new Error('malformed JSON: unterminated string');
}

function scanValue(s: Scanner, path: string, out: VerbatimMap): void {
  s.skipWs();
  const ch = s.peek();

  if (ch === '{') {
    s.expect('{');
    s.skipWs();
    if (s.peek() === '}') {
      s.pos += 1;
      return;
    }
    for (;;) {
      s.skipWs();
      const key = scanString(s);
      s.skipWs();
      s.expect(':');
      scanValue(s, path === '' ? key : `${path}.${key}`, out);
      s.skipWs();
      if (s.peek() === ',') {
        s.pos += 1;
        continue;
      }
      s.expect('}');
      return;
    }
  }

  if (ch === '[') {
    s.expect('[');
    s.skipWs();
    if (s.peek() === ']') {
      s.pos += 1;
      return;
    }
    let index = 0;
    for (;;) {
      scanValue(s, `${path}.${index}`, out);
      index += 1;
      s.skipWs();
      if (s.peek() === ',') {
        s.pos += 1;
        continue;
      }
      s.expect(']');
      return;
    }
  }

  if (ch === '"') {
    const start = s.pos;
    scanString(s);
    // Strings are recorded decoded — only numbers need source fidelity.
    out[path] = JSON.parse(s.text.slice(start, s.pos));
    return;
  }

  // number / true / false / null: take the raw token verbatim
  const start = s.pos;
  while (s.pos < s.text.length && !' \t\n\r,}]'.includes(s.text[s.pos])) {
    s.pos += 1;
  }
  const token = s.text.slice(start, s.pos);
  if (token === '') {
    throw new Error(`malformed JSON at offset ${start}`);
  }
  out[path] = token;
}

/** Map dotted field paths to their exact source tokens. */
export function verbatimFields(jsonText: string): VerbatimMap {
  const scanner = new Scanner(jsonText);
  const out: VerbatimMap = {};
  scanValue(scanner, '', out);
  scanner.skipWs();
  if (scanner.pos !== jsonText.length) {
    throw new Error('malformed JSON: trailing content');
  }
  return out;
}
