// DOM layer: draws a BoardModel verbatim. Full re-render per push keeps it
// deterministic; at board-game scale that is plenty fast.

import {
  ActionModel,
  BoardModel,
  CardPromptSpec,
  SlotModel,
  TeamModel,
} from "./viewmodel.js";

export interface RenderHandlers {
  onSubmit: (action: ActionModel, incur: number[]) => void;
  onPrompt: (action: ActionModel) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderView(root: HTMLElement, model: BoardModel,
                           handlers: RenderHandlers, locked: boolean): void {
  root.replaceChildren();

  const banner = el("div", "banner" + (model.status === "finished" ? " over" : ""));
  banner.append(el("span", "banner-text", model.banner));
  banner.append(el("span", "clock", model.clock));
  if (model.lastRoll !== null) {
    banner.append(el("span", "dice", `🎲 ${model.lastRoll}`));
  }
  root.append(banner);

  const boards = el("div", "boards");
  for (const team of model.teams) {
    boards.append(renderTeam(team, team.team === model.yourTeam));
  }
  root.append(boards);

  const feed = el("div", "feed");
  for (const line of model.feed) {
    feed.append(el("div", "feed-line", line));
  }
  root.append(feed);

  root.append(renderActions(model, handlers, locked));

  if (model.tally !== null) {
    const overlay = el("div", "tally");
    const box = el("div", "tally-box");
    box.append(el("h2", undefined,
      model.tally.winnerName === null ? "Draw" : `${model.tally.winnerName} wins`));
    box.append(el("p", undefined,
      `${model.teams[0].name} ${model.tally.scores[0]} — ` +
      `${model.tally.scores[1]} ${model.teams[1].name}`));
    box.append(el("p", "reason", `(${model.tally.reason})`));
    overlay.append(box);
    root.append(overlay);
  }
}

function renderTeam(team: TeamModel, isYou: boolean): HTMLElement {
  const panel = el("div", "team" + (team.isActive ? " active" : "")
    + (isYou ? " you" : ""));
  const head = el("div", "team-head");
  head.append(el("span", "team-name", team.name + (isYou ? " (you)" : "")));
  head.append(el("span", "team-score",
    `${team.usersBanked} users · ${team.tdCount} TD`));
  if (team.skipPending > 0) {
    head.append(el("span", "skip", `skips ${team.skipPending} turn(s)`));
  }
  for (const block of team.tempBlocked) {
    head.append(el("span", "temp-block",
      `digit ${block.digit} blocked ${block.rounds} round(s)`));
  }
  if (team.doubleUsersPending) {
    head.append(el("span", "boost", "next feature banks double users"));
  }
  panel.append(head);

  const modules = el("div", "modules");
  for (const module of team.modules) {
    const column = el("div", "module" + (module.complete ? " complete" : ""));
    column.append(el("div", "module-title", `Module ${module.id}`));
    for (const slot of module.slots) {
      column.append(renderSlot(slot));
    }
    modules.append(column);
  }
  panel.append(modules);

  if (team.hand.length > 0) {
    const hand = el("div", "hand");
    hand.append(el("div", "hand-title", "Action cards"));
    for (const card of team.hand) {
      const node = el("div", "card", card.title);
      node.title = card.narrative;
      hand.append(node);
    }
    panel.append(hand);
  }
  return panel;
}

function renderSlot(slot: SlotModel): HTMLElement {
  const node = el("div", `slot ${slot.state}`);
  const marker = slot.trigger === "event" ? " ?" : slot.trigger === "action" ? " !" : "";
  if (slot.ticket === null) {
    node.append(el("div", "slot-label", `${slot.kind}${marker}`));
    return node;
  }
  const ticket = slot.ticket;
  const head = el("div", "ticket-head",
    `${ticket.id}${marker}` + (ticket.users ? ` · ${ticket.users} users` : ""));
  node.append(head);

  const circles = el("div", "circles");
  for (const filled of ticket.circles) {
    circles.append(el("span", filled ? "circle filled" : "circle", filled ? "●" : "○"));
  }
  node.append(circles);

  const dice = el("div", "digits");
  for (const digit of ticket.digits) {
    let cls = "digit";
    if (digit.td) {
      cls += " td"; // red tile
    } else if (digit.printedBlocked) {
      cls += " printed-blocked"; // crossed out on the ticket
    }
    if (slot.state === "in-progress" && digit.blockedNow && !digit.td) {
      cls += " dep-blocked"; // union with predecessors' tiles
    }
    dice.append(el("span", cls, String(digit.digit)));
  }
  node.append(dice);
  if (slot.state === "in-progress") {
    node.append(el("div", "workable",
      ticket.workableDigits.length === 0
        ? "no digit can complete a task"
        : `workable: ${ticket.workableDigits.join(", ")}`));
  }
  return node;
}

function renderActions(model: BoardModel, handlers: RenderHandlers,
                       locked: boolean): HTMLElement {
  const bar = el("div", "actions");
  if (model.actions.length === 0) {
    bar.append(el("div", "actions-idle",
      model.status === "running" ? "Waiting for the other team…" : ""));
    return bar;
  }
  for (const action of model.actions) {
    const row = el("div", "action-row");
    const button = el("button", "action", action.label);
    button.disabled = locked;
    const toggles: HTMLInputElement[] = [];
    if (action.kind === "work" && (action.incurOptions ?? []).length > 0) {
      const opts = el("span", "incur");
      opts.append(el("span", "incur-label", "incur on:"));
      for (const digit of action.incurOptions ?? []) {
        const label = el("label", "incur-option", String(digit));
        const box = document.createElement("input");
        box.type = "checkbox";
        box.value = String(digit);
        box.disabled = locked;
        toggles.push(box);
        label.prepend(box);
        opts.append(label);
      }
      row.append(opts);
    }
    button.addEventListener("click", () => {
      if (action.prompt !== undefined &&
          (action.prompt.needsDigit || action.prompt.needsTarget)) {
        handlers.onPrompt(action);
        return;
      }
      const incur = toggles.filter((t) => t.checked).map((t) => Number(t.value));
      handlers.onSubmit(action, incur);
    });
    row.prepend(button);
    bar.append(row);
  }
  return bar;
}

export function renderPrompt(root: HTMLElement, spec: CardPromptSpec,
                             onConfirm: (selections: { digit?: number; target?: { module: string; ticket: number; digit: number } }) => void,
                             onCancel: () => void): void {
  const overlay = el("div", "modal");
  const box = el("div", "modal-box");
  box.append(el("h3", undefined, spec.title));
  box.append(el("p", "narrative", spec.narrative));
  const tags = el("p", "aha", spec.ahaTags.join(" · "));
  box.append(tags);

  let digitPick: number | undefined;
  let targetPick: { module: string; ticket: number; digit: number } | undefined;

  if (spec.noopNote !== null) {
    box.append(el("p", "noop", spec.noopNote));
  }
  if (spec.needsDigit) {
    const row = el("div", "pick-row");
    for (const digit of spec.digitChoices) {
      const button = el("button", "pick", String(digit));
      button.addEventListener("click", () => {
        digitPick = digit;
        row.querySelectorAll("button").forEach((b) => b.classList.remove("picked"));
        button.classList.add("picked");
      });
      row.append(button);
    }
    box.append(row);
  }
  if (spec.needsTarget) {
    const row = el("div", "pick-row");
    for (const target of spec.targets) {
      const button = el("button", "pick", target.label);
      button.addEventListener("click", () => {
        targetPick = { module: target.module, ticket: target.ticket,
                       digit: target.digit };
        row.querySelectorAll("button").forEach((b) => b.classList.remove("picked"));
        button.classList.add("picked");
      });
      row.append(button);
    }
    box.append(row);
  }

  const controls = el("div", "modal-controls");
  const confirm = el("button", "confirm", "Play card");
  confirm.addEventListener("click", () => {
    overlay.remove();
    onConfirm({ digit: digitPick, target: targetPick });
  });
  const cancel = el("button", "cancel", "Cancel");
  cancel.addEventListener("click", () => {
    overlay.remove();
    onCancel();
  });
  controls.append(confirm, cancel);
  box.append(controls);
  overlay.append(box);
  root.append(overlay);
}

export function renderError(root: HTMLElement, message: string): void {
  const note = el("div", "error-banner", message);
  root.prepend(note);
  setTimeout(() => note.remove(), 6000);
}
