import { describe, expect, it } from 'vitest';
import { verbatimFields } from '../src/verbatim.js';

describe('verbatimFields', () => {
  it('keeps number tokens exactly as written', () => {
    const tokens = verbatimFields('{"a":1.0,"b":0.0,"c":-0.5,"d":1e3,"e":0.19999999999999998}');
    expect(tokens.a).toBe('1.0');
    expect(tokens.b).toBe('0.0');
    expect(tokens.c).toBe('-0.5');
    expect(tokens.d).toBe('1e3');
    expect(tokens.e).toBe('0.19999999999999998');
  });

  it('addresses nested objects and arrays with dotted paths', () => {
    const tokens = verbatimFields('{"per_case":{"c1":2,"c3":1},"xs":[10,20.5]}');
    expect(tokens['per_case.c1']).toBe('2');
    expect(tokens['per_case.c3']).toBe('1');
    expect(tokens['xs.0']).toBe('10');
    expect(tokens['xs.1']).toBe('20.5');
  });

  it('decodes strings but records booleans and null verbatim', () => {
    const tokens = verbatimFields('{"s":"a\\"b","t":true,"n":null}');
    expect(tokens.s).toBe('a"b');
    expect(tokens.t).toBe('true');
    expect(tokens.n).toBe('null');
  });

  it('tolerates arbitrary whitespace', () => {
    const tokens = verbatimFields('  {\n  "x" :  3.50 ,\t"y":[ 1 , 2 ]\n}  ');
    expect(tokens.x).toBe('3.50');
    expect(tokens['y.1']).toBe('2');
  });

  it('handles empty containers and a bare top-level number', () => {
    expect(verbatimFields('{}')).toEqual({});
    expect(verbatimFields('[]')).toEqual({});
    expect(verbatimFields('2.0')).toEqual({ '': '2.0' });
  });

  it('rejects malformed documents', () => {
    expect(() => verbatimFields('{"a":1,}')).toThrow();
    expect(() => verbatimFields('{"a":1} trailing')).toThrow();
    expect(() => verbatimFields('{"a"')).toThrow();
  });

  it('agrees with JSON.parse on every numeric value', () => {
    const body = '{"u":0.3333333333333333,"avg":0.6666666666666666,"g":{"c1":2}}';
    const parsed = JSON.parse(body) as { u: number; avg: number; g: { c1: number } };
    const tokens = verbatimFields(body);
    expect(Number(tokens.u)).toBe(parsed.u);
    expect(Number(tokens.avg)).toBe(parsed.avg);
    expect(Number(tokens['g.c1'])).toBe(parsed.g.c1);
  });
});
