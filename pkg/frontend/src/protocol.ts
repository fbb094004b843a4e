/** Typed client for the session protocol served by `rpn serve`.
 *
 * This is the only channel to the engine: the UI never computes
 * enabledness or markings itself.
 */

export interface StateJson {
  marking: Record<string, string[]>;
  history: Record<string, number[]>;
  causes: [[string, number], [string, number]][];
}

export interface EnabledSets {
  forward: string[];
  bt: string[];
  co: string[];
  oco: string[];
}

export interface TransitionArcs {
  in: Record<string, string[]>;
  out: Record<string, string[]>;
}

export interface NetJson {
  name: string;
  tokens: string[];
  places: string[];
  transitions: Record<string, TransitionArcs>;
  initial: Record<string, string[]>;
}

export interface CreateResponse {
  id: string;
  state: StateJson;
}

export interface SessionResponse {
  net: NetJson;
  state: StateJson;
  enabled: EnabledSets;
}

export interface StepResponse {
  state: StateJson;
  enabled: EnabledSets;
}

export type ReverseMode = "bt" | "co" | "oco";

export interface ActionRequest {
  direction: "forward" | "reverse";
  transition: string;
  mode?: ReverseMode;
}

/** Error carrying the server's status and verbatim message. */
export class ProtocolError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ProtocolError";
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === "string") {
      message = body.error;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ProtocolError(response.status, message);
}

export class Client {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: string): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      body,
      headers: body === undefined ? undefined : { "Content-Type": "text/plain" },
    });
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  /** POST /sessions with the raw net text. */
  createSession(netText: string): Promise<CreateResponse> {
    return this.request<CreateResponse>("POST", "/sessions", netText);
  }

  /** GET /sessions/{id}: net structure, state and enabled sets. */
  getSession(id: string): Promise<SessionResponse> {
    return this.request<SessionResponse>("GET", `/sessions/${id}`);
  }

  /** POST /sessions/{id}/step; 409s surface as ProtocolError. */
  step(id: string, action: ActionRequest): Promise<StepResponse> {
    return this.request<StepResponse>(
      "POST",
      `/sessions/${id}/step`,
      JSON.stringify(action),
    );
  }

  /** POST /sessions/{id}/undo. */
  undo(id: string): Promise<StepResponse> {
    return this.request<StepResponse>("POST", `/sessions/${id}/undo`);
  }
}
