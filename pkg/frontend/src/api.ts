/**
 * Typed client for the annotation service wire API.
 *
 * The UI performs no statistics of its own: every number it displays is a
 * field from one of these responses, and the severity preview is a lookup
 * into the served matrix. Keeping all fetches behind this one client makes
 * that property testable by stubbing it.
 */

export interface Characteristic {
  name: string;
  model: "AI" | "AIP" | "Shared";
  layer: number;
}

export interface TaxonomyView {
  version: string;
  characteristics: Characteristic[];
}

export interface AttributeOption {
  value: string;
  description: string;
}

export interface SeverityOption {
  value: string;
  rank: number;
  description: string;
}

export interface SeverityPreviewEntry {
  criticality: string;
  reversibility: string;
  scope: string;
  severity: string;
}

export interface RubricView {
  ai_attributes: AttributeOption[];
  severities: SeverityOption[];
  criticality: string[];
  reversibility: string[];
  scope: string[];
  severity_preview: SeverityPreviewEntry[];
}

export interface OdcView {
  defect_type: string | null;
  trigger: string | null;
  phase_found: string | null;
}

export interface DefectView {
  id: string;
  platform: string;
  framework: string;
  title: string;
  description: string;
  defect_type_label: string;
  cross_refs: string[];
  odc: OdcView | null;
  created_at: string | null;
}

export interface NextTask {
  defect: DefectView | null;
  remaining: number;
}

export interface LabelView {
  defect_id: string;
  annotator: string | null;
  ai: string;
  severity: string | null;
  impacts: string[];
  provenance: string;
  rationale: string | null;
}

/** Body of a label or resolution submission. */
export interface LabelSubmission {
  defect_id: string;
  ai: string;
  severity?: string | null;
  impacts?: string[];
  rationale?: string | null;
}

export interface Progress {
  total: number;
  pending: number;
  labeled: number;
  disputed: number;
  resolved: number;
  percent_complete: number;
}

export interface SessionSummary {
  id: string;
  project: string;
  annotators: string[];
  defect_count: number;
  progress: Progress;
}

export interface Dispute {
  defect_id: string;
  labels: LabelView[];
  impact_difference: string[];
}

export interface DisputesView {
  attribute: string;
  disputes: Dispute[];
}

export interface AgreementView {
  attribute: string;
  p_o: number;
  p_e: number;
  kappa: number;
  n: number;
}

/** Degenerate statistics come back as tagged errors, not numbers. */
export interface WireError {
  error: string;
  detail: string;
}

export type AgreementEntry = AgreementView | WireError;

export function isWireError(x: unknown): x is WireError {
  return typeof x === "object" && x !== null && "error" in x;
}

export interface DistributionRow {
  category: string;
  count: number;
  percent: number;
}

export interface DistributionView {
  attribute: string;
  rows: DistributionRow[];
  total: number;
  excluded: number;
}

export interface IndependenceView {
  statistic: number;
  dof: number;
  p_value: number;
  warning: boolean;
}

export interface TwoWayView {
  row_attribute: string;
  col_attribute: string;
  row_categories: string[];
  col_categories: string[];
  counts: number[][];
  row_marginals: number[];
  col_marginals: number[];
  total: number;
  excluded: number;
  independence: IndependenceView | WireError;
}

export interface StatsView {
  id: string;
  project: string;
  annotators: string[];
  progress: Progress;
  agreement: Record<string, AgreementEntry>;
  one_way: Record<string, DistributionView>;
  two_way: Omit<TwoWayView, "independence">;
  independence: IndependenceView | WireError;
}

export interface CreateSessionRequest {
  id?: string;
  project?: string;
  defects?: string[];
  annotators: string[];
}

export interface CreateSessionResponse {
  id: string;
  project: string;
  defect_count: number;
  annotators: string[];
}

export interface SubmitResponse {
  defect_id: string;
  status: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Error raised for any non-2xx response, carrying the server's error type. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly type: string,
    readonly detail: string,
  ) {
    super(`${type}: ${detail}`);
    this.name = "ApiError";
  }
}

/** Everything the views are allowed to ask the server. */
export interface Api {
  health(): Promise<{ status: string; sessions: number }>;
  taxonomy(): Promise<TaxonomyView>;
  rubric(): Promise<RubricView>;
  sessions(): Promise<{ sessions: SessionSummary[] }>;
  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse>;
  nextTask(sid: string, annotator: string): Promise<NextTask>;
  submitLabel(
    sid: string,
    annotator: string,
    label: LabelSubmission,
  ): Promise<SubmitResponse>;
  disputes(sid: string, attribute?: string): Promise<DisputesView>;
  resolve(
    sid: string,
    resolver: string,
    label: LabelSubmission,
  ): Promise<SubmitResponse>;
  stats(sid: string): Promise<StatsView>;
  oneWay(attr: string, session?: string): Promise<DistributionView>;
  twoWay(session?: string): Promise<TwoWayView>;
}

export class ApiClient implements Api {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      const err = (body ?? {}) as Partial<WireError>;
      throw new ApiError(
        response.status,
        err.error ?? `HTTP ${response.status}`,
        err.detail ?? response.statusText,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<{ status: string; sessions: number }> {
    return this.request("/health");
  }

  taxonomy(): Promise<TaxonomyView> {
    return this.request("/taxonomy");
  }

  rubric(): Promise<RubricView> {
    return this.request("/rubric");
  }

  sessions(): Promise<{ sessions: SessionSummary[] }> {
    return this.request("/sessions");
  }

  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.post("/sessions", req);
  }

  nextTask(sid: string, annotator: string): Promise<NextTask> {
    const q = encodeURIComponent(annotator);
    return this.request(`/sessions/${encodeURIComponent(sid)}/next?annotator=${q}`);
  }

  submitLabel(
    sid: string,
    annotator: string,
    label: LabelSubmission,
  ): Promise<SubmitResponse> {
    return this.post(`/sessions/${encodeURIComponent(sid)}/labels`, {
      annotator,
      label,
    });
  }

  disputes(sid: string, attribute = "combined"): Promise<DisputesView> {
    const q = encodeURIComponent(attribute);
    return this.request(
      `/sessions/${encodeURIComponent(sid)}/disputes?attribute=${q}`,
    );
  }

  resolve(
    sid: string,
    resolver: string,
    label: LabelSubmission,
  ): Promise<SubmitResponse> {
    return this.post(`/sessions/${encodeURIComponent(sid)}/resolutions`, {
      resolver,
      label,
    });
  }

  stats(sid: string): Promise<StatsView> {
    return this.request(`/sessions/${encodeURIComponent(sid)}/stats`);
  }

  oneWay(attr: string, session?: string): Promise<DistributionView> {
    const params = new URLSearchParams({ attr });
    if (session) params.set("session", session);
    return this.request(`/analysis/one-way?${params}`);
  }

  twoWay(session?: string): Promise<TwoWayView> {
    const params = new URLSearchParams();
    if (session) params.set("session", session);
    const suffix = params.size ? `?${params}` : "";
    return this.request(`/analysis/two-way${suffix}`);
  }
}
