// Minimal SSE handling over fetch streams. Works in browsers and node 20+,
// and keeps reconnect/resync behaviour in our hands (native EventSource
// cannot attach custom headers or surface HTTP errors cleanly).

export interface SseFrame {
  id?: string;
  event?: string;
  data: string;
}

// Incremental parser: feed arbitrary chunks, get completed frames back.
export class SseParser {
  private buffer = "";

  feed(chunk: string): SseFrame[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const frames: SseFrame[] = [];
    let sep = this.buffer.indexOf("\n\n");
    while (sep >= 0) {
      const raw = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      const frame = parseFrame(raw);
      if (frame !== null) {
        frames.push(frame);
      }
      sep = this.buffer.indexOf("\n\n");
    }
    return frames;
  }
}

function parseFrame(raw: string): SseFrame | null {
  let id: string | undefined;
  let event: string | undefined;
  const data: string[] = [];
  for (const line of raw.split("\n")) {
    if (line === "" || line.startsWith(":")) {
      continue; // comment / keepalive
    }
    const colon = line.indexOf(":");
    const field = colon < 0 ? line : line.slice(0, colon);
    let value = colon < 0 ? "" : line.slice(colon + 1);
    if (value.startsWith(" ")) {
      value = value.slice(1);
    }
    if (field === "id") {
      id = value;
    } else if (field === "event") {
      event = value;
    } else if (field === "data") {
      data.push(value);
    }
  }
  if (id === undefined && event === undefined && data.length === 0) {
    return null; // pure keepalive block
  }
  return { id, event, data: data.join("\n") };
}

export interface StreamHandlers {
  onFrame: (frame: SseFrame) => void;
  onEnd?: () => void;
  onError?: (error: unknown) => void;
}

// Read one SSE response to completion. Returns when the stream closes.
export async function consumeSseResponse(
  body: ReadableStream<Uint8Array>,
  handlers: StreamHandlers,
): Promise<void> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  const parser = new SseParser();
  for (;;) {
    const { done, value } = await reader.read();
    if (done) {
      break;
    }
    for (const frame of parser.feed(decoder.decode(value, { stream: true }))) {
      if (frame.event === "end") {
        handlers.onEnd?.();
        return;
      }
      handlers.onFrame(frame);
    }
  }
  handlers.onEnd?.();
}

export interface StreamConnection {
  close: () => void;
  done: Promise<void>;
}

// Open the session stream and keep reading until the game ends or close()
// is called. Transport errors reconnect with backoff; the server sends a
// full snapshot on connect, so reconnects resync automatically.
export function openStream(url: string, handlers: StreamHandlers): StreamConnection {
  const controller = new AbortController();
  let closed = false;

  const done = (async () => {
    let backoff = 500;
    for (;;) {
      try {
        const response = await fetch(url, {
          signal: controller.signal,
          headers: { accept: "text/event-stream" },
        });
        if (!response.ok || response.body === null) {
          throw new Error(`stream failed: HTTP ${response.status}`);
        }
        backoff = 500;
        let ended = false;
        await consumeSseResponse(response.body, {
          onFrame: handlers.onFrame,
          onEnd: () => {
            ended = true;
          },
        });
        if (ended || closed) {
          handlers.onEnd?.();
          return;
        }
      } catch (error) {
        if (closed) {
          handlers.onEnd?.();
          return;
        }
        handlers.onError?.(error);
      }
      await new Promise((resolve) => setTimeout(resolve, backoff));
      backoff = Math.min(backoff * 2, 10_000);
    }
  })();

  return {
    close: () => {
      closed = true;
      controller.abort();
    },
    done,
  };
}
