// Entry point: join a session, follow the push stream, submit moves.
//
// Client state is nothing but (last applied view, in-flight flag, prompt).
// Pushes apply in seq order; a gap triggers a resync from /state; the
// server is the sole authority and every rejection is shown verbatim.

import { ApiError, GameClient, classifyPush } from "./api.js";
import { ClientView } from "./types.js";
import {
  ActionModel,
  boardModel,
  collectBindings,
  composeWork,
} from "./viewmodel.js";
import { renderError, renderPrompt, renderView } from "./render.js";

const root = document.getElementById("app") as HTMLElement;

let client: GameClient;
let sessionId = "";
let token = "";
let view: ClientView | null = null;
let inflight = false;
let clockTimer: number | undefined;

function currentSeq(): number | null {
  return view === null ? null : view.seq;
}

function applyView(next: ClientView): void {
  view = next;
  inflight = false;
  draw();
}

async function resync(): Promise<void> {
  try {
    applyView(await client.fetchState(sessionId, token));
  } catch (error) {
    renderError(root, String(error));
  }
}

function onPush(pushed: ClientView): void {
  switch (classifyPush(currentSeq(), pushed.seq)) {
    case "apply":
      applyView(pushed);
      break;
    case "gap":
      void resync();
      break;
    case "stale":
      break;
  }
}

function draw(): void {
  if (view === null) {
    return;
  }
  const model = boardModel(view);
  renderView(root, model, { onSubmit: submit, onPrompt: openPrompt }, inflight);
  updateClock();
}

function updateClock(): void {
  if (clockTimer !== undefined) {
    window.clearInterval(clockTimer);
    clockTimer = undefined;
  }
  const deadline = view?.deadline_epoch;
  const node = root.querySelector(".clock");
  if (!deadline || view?.status !== "running" || node === null) {
    return;
  }
  const tick = () => {
    const left = Math.max(0, Math.floor(deadline - Date.now() / 1000));
    const minutes = Math.floor(left / 60);
    const seconds = String(left % 60).padStart(2, "0");
    node.textContent = `round ${view?.round} / ${view?.max_rounds} · ⏱ ${minutes}:${seconds}`;
  };
  tick();
  clockTimer = window.setInterval(tick, 1000);
}

async function submit(action: ActionModel, incur: number[]): Promise<void> {
  if (inflight || view === null) {
    return;
  }
  const move = action.kind === "work" ? composeWork(action, incur) : action.move;
  inflight = true; // optimistic lock until the push (or rejection) arrives
  draw();
  try {
    await client.submitMove(sessionId, token, move);
    // the accepted view arrives via the stream; the lock clears there
  } catch (error) {
    inflight = false;
    draw();
    if (error instanceof ApiError) {
      renderError(root, `Move rejected: ${error.reason}`);
    } else {
      renderError(root, String(error));
    }
  }
}

function openPrompt(action: ActionModel): void {
  if (action.prompt === undefined) {
    return;
  }
  const spec = action.prompt;
  renderPrompt(root, spec, (selections) => {
    const outcome = collectBindings(spec, selections);
    if ("error" in outcome) {
      renderError(root, outcome.error);
      return;
    }
    void submitMoveDirectly(outcome.move);
  }, () => {
    // cancel: no move is sent
  });
}

async function submitMoveDirectly(move: Parameters<GameClient["submitMove"]>[2]):
    Promise<void> {
  if (inflight) {
    return;
  }
  inflight = true;
  draw();
  try {
    await client.submitMove(sessionId, token, move);
  } catch (error) {
    inflight = false;
    draw();
    if (error instanceof ApiError) {
      renderError(root, `Move rejected: ${error.reason}`);
    } else {
      renderError(root, String(error));
    }
  }
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const form = document.getElementById("join-form") as HTMLElement;
  const base = window.location.origin;
  client = new GameClient(base);

  sessionId = params.get("session") ?? "";
  token = params.get("token") ?? "";
  if (!sessionId || !token) {
    form.style.display = "block";
    const button = document.getElementById("join-button") as HTMLButtonElement;
    button.addEventListener("click", () => {
      const sid = (document.getElementById("session-input") as HTMLInputElement).value.trim();
      const tok = (document.getElementById("token-input") as HTMLInputElement).value.trim();
      window.location.search = `?session=${encodeURIComponent(sid)}&token=${encodeURIComponent(tok)}`;
    });
    return;
  }
  form.style.display = "none";

  try {
    const joined = await client.join(sessionId, token);
    applyView(joined.view);
  } catch (error) {
    renderError(root, `Could not join: ${error instanceof ApiError ? error.reason : error}`);
    return;
  }
  client.streamViews(sessionId, token, onPush, () => {
    void resync(); // final state after the stream ends
  });
}

void start();
