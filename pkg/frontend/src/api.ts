// Typed client for the tuning service.
//
// One in-flight refit per panel: scheduling a new sweep for a panel
// aborts the superseded request after a debounce window.

import type { LockResponse, RefitResponse, ServiceErrorBody, SessionCreated } from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public body: ServiceErrorBody,
  ) {
    super(body.message);
  }
}

export interface ServiceClient {
  createSession(body: unknown): Promise<SessionCreated>;
  refit(
    sessionId: string,
    overrides: { lambda2?: Record<string, number>; patterns?: Record<string, string> },
    signal?: AbortSignal,
  ): Promise<RefitResponse>;
  lock(sessionId: string, characteristic: string, lambda2: number): Promise<LockResponse>;
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) throw new ServiceError(response.status, body as ServiceErrorBody);
  return body as T;
}

export class HttpServiceClient implements ServiceClient {
  constructor(private baseUrl: string) {}

  private post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    }).then((r) => parse<T>(r));
  }

  createSession(body: unknown): Promise<SessionCreated> {
    return this.post("/sessions", body);
  }

  refit(
    sessionId: string,
    overrides: { lambda2?: Record<string, number>; patterns?: Record<string, string> },
    signal?: AbortSignal,
  ): Promise<RefitResponse> {
    return this.post(`/sessions/${sessionId}/refit`, overrides, signal);
  }

  lock(sessionId: string, characteristic: string, lambda2: number): Promise<LockResponse> {
    return this.post(`/sessions/${sessionId}/lock`, { characteristic, lambda2 });
  }
}

type Timer = ReturnType<typeof setTimeout>;

/** Debounced per-panel refits; a newer request supersedes and aborts the older. */
export class RefitScheduler {
  private timers = new Map<string, Timer>();
  private inFlight = new Map<string, AbortController>();

  constructor(
    private client: ServiceClient,
    private sessionId: string,
    private debounceMs = 150,
  ) {}

  schedule(
    panel: string,
    overrides: { lambda2?: Record<string, number>; patterns?: Record<string, string> },
    onResult: (r: RefitResponse) => void,
    onError: (e: unknown) => void,
  ): void {
    const pending = this.timers.get(panel);
    if (pending !== undefined) clearTimeout(pending);
    this.timers.set(
      panel,
      setTimeout(() => {
        this.timers.delete(panel);
        this.inFlight.get(panel)?.abort();
        const controller = new AbortController();
        this.inFlight.set(panel, controller);
        this.client
          .refit(this.sessionId, overrides, controller.signal)
          .then((result) => {
            if (!controller.signal.aborted) onResult(result);
          })
          .catch((err) => {
            if (!controller.signal.aborted) onError(err);
          })
          .finally(() => {
            if (this.inFlight.get(panel) === controller) this.inFlight.delete(panel);
          });
      }, this.debounceMs),
    );
  }
}
