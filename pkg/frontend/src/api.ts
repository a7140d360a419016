import type {
  CompleteResponse,
  ProblemView,
  RuleInfo,
  SessionInfo,
  StepRequest,
  StepResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class TutorClient {
  private fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: unknown };
        if (payload.detail !== undefined) detail = JSON.stringify(payload.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  rules(): Promise<RuleInfo[]> {
    return this.request("GET", "/rules");
  }

  createSession(studentId: string, seed?: number): Promise<SessionInfo> {
    return this.request("POST", "/sessions", { student_id: studentId, seed });
  }

  assignCondition(sessionId: string, condition: "Control" | "GPP"): Promise<ProblemView> {
    return this.request("POST", `/sessions/${sessionId}/condition`, { condition });
  }

  problem(sessionId: string): Promise<ProblemView> {
    return this.request("GET", `/sessions/${sessionId}/problem`);
  }

  step(sessionId: string, step: StepRequest): Promise<StepResponse> {
    return this.request("POST", `/sessions/${sessionId}/step`, step);
  }

  hint(sessionId: string): Promise<{ hint: import("./types").HintView }> {
    return this.request("POST", `/sessions/${sessionId}/hint`, {});
  }

  explanation(sessionId: string, text: string): Promise<{ session_complete: boolean }> {
    return this.request("POST", `/sessions/${sessionId}/explanation`, { text });
  }

  complete(sessionId: string): Promise<CompleteResponse> {
    return this.request("POST", `/sessions/${sessionId}/complete`, {});
  }

  async log(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/log`);
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }
}
