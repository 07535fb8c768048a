/** Typed client for the scheduling session service.
 *
 * Every number the UI shows comes straight out of these responses; the
 * client never recomputes schedule or cost state. Money values arrive as
 * integers or exact "p/q" strings and are passed through untouched.
 */

export type Money = number | string;

export interface Totals {
  lost_cost: Money;
  task_cost: Money;
  global_cost: Money;
  currency_label: string;
}

export interface SessionSummary {
  id: string;
  revision: number;
  totals: Totals;
  gain: Money;
  unassigned: string[];
  placement_count: number;
  window_count: number;
}

export interface PlacementView {
  task_id: string;
  title: string;
  kind: "preventive" | "dynamic";
  start: string;
  end: string;
  start_minute: number;
  end_minute: number;
  duration_minutes: number;
  resource: string | null;
  t1: number;
  t2: number;
}

export interface GapView {
  index: number;
  start: string;
  end: string;
  start_minute: number;
  end_minute: number;
  minutes: number;
}

export interface ScheduleSnapshot {
  session: string;
  revision: number;
  epoch: string;
  horizon: { start: string; end: string };
  placements: PlacementView[];
  gap_rows: GapView[];
  windows: GapView[];
  assignment: { by_task: Record<string, string>; unassigned: string[] };
}

export interface CostsResponse {
  session: string;
  revision: number;
  report: unknown;
  totals: Totals;
  baseline: Totals;
  gain: Money;
  trend: Money[];
}

export interface TaskForm {
  id?: string;
  title?: string;
  duration_minutes: number;
}

export interface InsertionResponse {
  session: string;
  mode: "preview" | "commit";
  revision: number;
  task_id: string;
  window_index: number | null;
  appended: boolean;
  t1: number;
  t2: number;
  start_minute: number;
  end_minute: number;
  start: string;
  end: string;
  resource: string | null;
  totals: Totals;
  gain: Money;
  report: unknown;
}

/** Commit raced another mutation; the caller should refetch and re-preview. */
export class ConflictError extends Error {}

/** The service rejected the request payload. */
export class RequestError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function parseFailure(resp: Response): Promise<never> {
  let detail = `${resp.status} ${resp.statusText}`;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    /* fall back to the status line */
  }
  if (resp.status === 409) throw new ConflictError(detail);
  throw new RequestError(detail, resp.status);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!resp.ok) await parseFailure(resp);
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  createSession(scenario: unknown): Promise<SessionSummary> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ scenario }),
    });
  }

  getSchedule(sid: string): Promise<ScheduleSnapshot> {
    return this.request(`/sessions/${encodeURIComponent(sid)}/schedule`);
  }

  getCosts(sid: string): Promise<CostsResponse> {
    return this.request(`/sessions/${encodeURIComponent(sid)}/costs`);
  }

  insertTask(
    sid: string,
    task: TaskForm,
    mode: "preview" | "commit",
    revision?: number,
    policy?: string,
  ): Promise<InsertionResponse> {
    const body: Record<string, unknown> = { task };
    if (revision !== undefined) body.revision = revision;
    if (policy !== undefined) body.policy = policy;
    return this.request(
      `/sessions/${encodeURIComponent(sid)}/tasks?mode=${mode}`,
      { method: "POST", body: JSON.stringify(body) },
    );
  }

  undo(sid: string): Promise<SessionSummary> {
    return this.request(`/sessions/${encodeURIComponent(sid)}/undo`, {
      method: "POST",
      body: "{}",
    });
  }
}
