/** Typed client for the session service. All numbers rendered by the console
 * come verbatim from these payloads; the client never recomputes indices. */

export type SessionStatement = { id: number; text: string };

export type SessionView = {
  id: string;
  revision: number;
  running: boolean;
  criteria: { label: string; direction: string }[];
  alternatives: string[];
  scales: string;
  statements: SessionStatement[];
  results_revision: number | null;
  results_stale: boolean;
};

export type Compatibility = {
  revision: number;
  status: string;
  compatible: boolean;
  epsilon_star: number | null;
  suspect_rows: string[];
};

export type ResultsDoc = {
  alternatives: string[];
  criteria: string[];
  additivity: number;
  iterations_total: number;
  iterations_feasible: number;
  rank_acceptability: number[][];
  preference_strict: number[][];
  preference_indifferent: number[][];
  central_capacities: (number[] | null)[];
  first_rank_counts: number[];
  barycenter: number[];
  confidence_factor: (number | null)[];
  extreme_ranks: number[][];
  necessary_approx: boolean[][];
  possible_approx: boolean[][];
  metadata: Record<string, unknown>;
};

export type ResultsEnvelope =
  | { status: "none"; revision: number }
  | { status: "running"; revision: number }
  | {
      status: "ready";
      revision: number;
      results_revision: number;
      stale: boolean;
      results: ResultsDoc;
    };

export type StatementRejection = {
  error: string;
  statement?: string;
  epsilon_star?: number | null;
  suspect_rows?: string[];
  column?: number;
};

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: unknown,
  ) {
    super(`HTTP ${status}`);
  }
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  const res = await fetch(path, {
    method,
    headers: { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = res.status === 204 ? null : await res.json();
  if (!res.ok) {
    throw new ApiError(res.status, payload);
  }
  return payload as T;
}

export function createSession(problem: unknown): Promise<{ id: string; revision: number; epsilon_star: number | null; compatible: boolean }> {
  return request("POST", "/sessions", { problem });
}

export function getSession(id: string): Promise<SessionView> {
  return request("GET", `/sessions/${id}`);
}

export function listSessions(): Promise<SessionView[]> {
  return request("GET", "/sessions");
}

export function getCompatibility(id: string): Promise<Compatibility> {
  return request("GET", `/sessions/${id}/compatibility`);
}

export function addStatement(id: string, statement: string): Promise<{ revision: number; statement: SessionStatement; epsilon_star: number }> {
  return request("POST", `/sessions/${id}/statements`, { statement });
}

export function removeStatement(id: string, statementId: number): Promise<{ revision: number; epsilon_star: number }> {
  return request("DELETE", `/sessions/${id}/statements/${statementId}`);
}

export function triggerRun(id: string, config: Record<string, unknown> = {}): Promise<{ revision: number; status: string }> {
  return request("POST", `/sessions/${id}/run`, { config });
}

export function getResults(id: string): Promise<ResultsEnvelope> {
  return request("GET", `/sessions/${id}/results`);
}

/** Poll the results endpoint until the run completes. */
export async function pollResults(
  id: string,
  intervalMs = 500,
  onTick?: (env: ResultsEnvelope) => void,
): Promise<ResultsEnvelope> {
  for (;;) {
    const env = await getResults(id);
    onTick?.(env);
    if (env.status !== "running") {
      return env;
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
