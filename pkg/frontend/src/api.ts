// Typed client for the repo-service HTTP API. Every console feature goes
// through this module; nothing in the console reads files or computes
// privacy figures on its own.

import type {
  EntryDetail,
  GuideChoices,
  JobStatus,
  Lineage,
  RepoEntry,
  RiskReport,
  TechniquesResponse,
  UtilityReport,
  ValidationProblem,
} from './types.js';
import { verbatimFields, type VerbatimMap } from './verbatim.js';

/** A 4xx from the service, carrying the parsed problem document. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly messages: Record<string, string> = {},
  ) {
    super(detail);
    this.name = 'ServiceError';
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let detail = `${resp.status} ${resp.statusText}`;
  let messages: Record<string, string> = {};
  try {
    const body = (await resp.json()) as Partial<ValidationProblem>;
    if (typeof body.detail === 'string') detail = body.detail;
    if (body.messages && typeof body.messages === 'object') messages = body.messages;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ServiceError(resp.status, detail, messages);
}

export interface JobRequest {
  technique: string;
  input: string;
  params: Record<string, unknown>;
  seed?: number;
  worker_count?: number;
}

function toBytes(content: ArrayBuffer | Uint8Array | string): Uint8Array {
  if (typeof content === 'string') return new TextEncoder().encode(content);
  return content instanceof Uint8Array ? content : new Uint8Array(content);
}

// The upload body is assembled by hand so the request bytes are identical in
// every runtime the console is driven from; the boundary embeds a random tag
// so it cannot collide with log content.
function multipartFile(
  filename: string,
  content: Uint8Array,
  extra: Record<string, string>,
): { body: ArrayBuffer; contentType: string } {
  const boundary = `----pc4pm-${Math.random().toString(36).slice(2)}${Date.now().toString(36)}`;
  const encoder = new TextEncoder();
  const chunks: Uint8Array[] = [];
  const push = (text: string) => chunks.push(encoder.encode(text));
  for (const [field, value] of Object.entries(extra)) {
    push(`--${boundary}\r\nContent-Disposition: form-data; name="${field}"\r\n\r\n${value}\r\n`);
  }
  push(
    `--${boundary}\r\nContent-Disposition: form-data; name="file"; filename="${filename}"\r\n` +
      'Content-Type: application/octet-stream\r\n\r\n',
  );
  chunks.push(content);
  push(`\r\n--${boundary}--\r\n`);
  const body = new Uint8Array(chunks.reduce((total, chunk) => total + chunk.length, 0));
  let offset = 0;
  for (const chunk of chunks) {
    body.set(chunk, offset);
    offset += chunk.length;
  }
  return {
    body: body.buffer as ArrayBuffer,
    contentType: `multipart/form-data; boundary=${boundary}`,
  };
}

export class Api {
  constructor(readonly baseUrl: string = '') {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) await raiseFor(resp);
    return (await resp.json()) as T;
  }

  techniques(): Promise<TechniquesResponse> {
    return this.json('/techniques');
  }

  /** Service-side guide filter; only non-null choices are sent. */
  guide(choices: GuideChoices): Promise<{ techniques: string[] }> {
    const body: Record<string, string> = {};
    for (const [dim, value] of Object.entries(choices)) {
      if (value != null) body[dim] = value;
    }
    return this.json('/guide', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  listLogs(): Promise<{ entries: RepoEntry[] }> {
    return this.json('/logs');
  }

  upload(
    filename: string,
    content: ArrayBuffer | Uint8Array | string,
    name?: string,
  ): Promise<RepoEntry> {
    const { body, contentType } = multipartFile(
      filename,
      toBytes(content),
      name === undefined ? {} : { name },
    );
    return this.json('/logs', {
      method: 'POST',
      headers: { 'content-type': contentType },
      body,
    });
  }

  showLog(entryId: string): Promise<EntryDetail> {
    return this.json(`/logs/${entryId}`);
  }

  lineage(entryId: string): Promise<Lineage> {
    return this.json(`/logs/${entryId}/lineage`);
  }

  deleteLog(entryId: string): Promise<{ deleted: string }> {
    return this.json(`/logs/${entryId}`, { method: 'DELETE' });
  }

  submitJob(req: JobRequest): Promise<JobStatus> {
    return this.json('/jobs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
    });
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.json(`/jobs/${jobId}`);
  }

  /**
   * Risk/utility reports keep the raw body alongside the parsed document so
   * the dashboards can show each number exactly as the service wrote it.
   */
  async risk(
    log: string,
    kind: string,
    l: number,
  ): Promise<{ report: RiskReport; tokens: VerbatimMap }> {
    const query = new URLSearchParams({ log, kind, l: String(l) });
    const resp = await fetch(`${this.baseUrl}/analysis/risk?${query}`);
    if (!resp.ok) await raiseFor(resp);
    const text = await resp.text();
    return { report: JSON.parse(text) as RiskReport, tokens: verbatimFields(text) };
  }

  async utility(
    original: string,
    anonymized: string,
  ): Promise<{ report: UtilityReport; tokens: VerbatimMap }> {
    const query = new URLSearchParams({ original, anonymized });
    const resp = await fetch(`${this.baseUrl}/analysis/utility?${query}`);
    if (!resp.ok) await raiseFor(resp);
    const text = await resp.text();
    return { report: JSON.parse(text) as UtilityReport, tokens: verbatimFields(text) };
  }
}
