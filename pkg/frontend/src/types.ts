// Shapes of the repo-service JSON responses the console consumes.

export type DimensionName = 'pmps' | 'pmac' | 'prps' | 'prac';

export interface TechniqueSignature {
  technique_id: string;
  summary: string;
  pmps: string[];
  pmac: string[];
  prps: string[];
  prac: string[];
}

export interface ParameterSchema {
  name: string;
  type: 'integer' | 'real' | 'string' | 'boolean' | 'choice' | 'list' | 'object';
  help: string;
  required?: boolean;
  default?: unknown;
  min?: number;
  exclusive_min?: boolean;
  max?: number;
  choices?: string[];
}

export interface RunnerSchema {
  technique: string;
  summary: string;
  input_kinds: string[];
  parameters: ParameterSchema[];
}

export interface TechniquesResponse {
  techniques: TechniqueSignature[];
  runners: Record<string, RunnerSchema>;
}

/** One optional choice per guide dimension; absent/null means "no preference". */
export type GuideChoices = Partial<Record<DimensionName, string | null>>;

export interface RepoEntry {
  entry_id: string;
  kind: 'xes' | 'ela';
  name: string;
  created_at: string;
  parent_ids: string[];
  technique: string | null;
  deleted?: boolean;
}

export interface OperationSummary {
  seq: number;
  operation_kind: string;
  level: string;
  target_attributes: string[];
}

export interface LogSummary {
  traces: number;
  events: number;
  variants: number;
  operation_records: number;
  operations: OperationSummary[];
}

export interface EntryDetail extends RepoEntry {
  summary?: LogSummary;
}

export interface LineageEdge {
  from: string;
  to: string;
  technique: string;
}

export interface Lineage {
  root: string;
  nodes: RepoEntry[];
  edges: LineageEdge[];
}

export type JobState = 'queued' | 'running' | 'done' | 'failed';

export interface JobStatus {
  job_id: string;
  technique: string;
  input: string;
  params: Record<string, unknown>;
  seed: number;
  worker_count: number;
  state: JobState;
  outputs: string[];
  error: string | null;
  submitted_at: string;
  finished_at: string | null;
}

export interface RiskReport {
  knowledge_kind: string;
  l: number;
  uniqueness_rate: number;
  avg_reid_probability: number;
  per_case_min_group: Record<string, number>;
}

export interface UtilityReport {
  variant_preservation: number;
  df_distance: number;
  event_count_ratio: number;
}

/** 422 payload: one human-readable message per offending field. */
export interface ValidationProblem {
  detail: string;
  messages: Record<string, string>;
}
