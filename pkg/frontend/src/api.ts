// Typed client for the session service. Every call returns parsed JSON or
// throws ApiError carrying the server's machine-readable rejection.

import { openStream, StreamConnection } from "./sse.js";
import {
  ClientView,
  CreatedSession,
  Move,
  Rejection,
  SeatView,
  WIRE_SCHEMA,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly reason: string;

  constructor(status: number, rejection: Rejection) {
    super(`${rejection.code}: ${rejection.reason}`);
    this.status = status;
    this.code = rejection.code;
    this.reason = rejection.reason;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    ...init,
    headers: { "content-type": "application/json", ...init?.headers },
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const rejection: Rejection = (body as { error?: Rejection }).error ?? {
      code: `http_${response.status}`,
      reason: response.statusText,
    };
    throw new ApiError(response.status, rejection);
  }
  return body as T;
}

export function checkSchema(view: ClientView): void {
  if (view.schema !== WIRE_SCHEMA) {
    throw new Error(`schema mismatch: server speaks ${view.schema}, ` +
      `this client speaks ${WIRE_SCHEMA}`);
  }
}

export class GameClient {
  constructor(readonly baseUrl: string) {}

  createSession(options: Record<string, unknown> = {}): Promise<CreatedSession> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(options),
    });
  }

  async join(sessionId: string, token: string):
      Promise<{ seat: SeatView; view: ClientView }> {
    const result = await request<{ seat: SeatView; view: ClientView }>(
      `${this.baseUrl}/sessions/${sessionId}/join`,
      { method: "POST", body: JSON.stringify({ token }) },
    );
    checkSchema(result.view);
    return result;
  }

  async submitMove(sessionId: string, token: string, move: Move):
      Promise<ClientView> {
    const result = await request<{ accepted: boolean; view: ClientView }>(
      `${this.baseUrl}/sessions/${sessionId}/moves`,
      { method: "POST", body: JSON.stringify({ token, move }) },
    );
    checkSchema(result.view);
    return result.view;
  }

  async fetchState(sessionId: string, token: string): Promise<ClientView> {
    const view = await request<ClientView>(
      `${this.baseUrl}/sessions/${sessionId}/state?token=${encodeURIComponent(token)}`,
    );
    checkSchema(view);
    return view;
  }

  streamViews(
    sessionId: string,
    token: string,
    onView: (view: ClientView) => void,
    onEnd?: () => void,
  ): StreamConnection {
    const url = `${this.baseUrl}/sessions/${sessionId}/stream` +
      `?token=${encodeURIComponent(token)}`;
    return openStream(url, {
      onFrame: (frame) => {
        if (frame.data) {
          const view = JSON.parse(frame.data) as ClientView;
          checkSchema(view);
          onView(view);
        }
      },
      onEnd,
    });
  }
}

// Push ordering: views apply strictly forward. A gap means we missed a
// push and must resync from /state; stale frames are dropped.
export type PushVerdict = "apply" | "stale" | "gap";

export function classifyPush(currentSeq: number | null, incoming: number): PushVerdict {
  if (currentSeq === null || incoming === currentSeq + 1 || incoming === currentSeq) {
    return incoming === currentSeq ? "stale" : "apply";
  }
  return incoming < (currentSeq ?? 0) ? "stale" : "gap";
}
