// Hand-built ClientView fixtures for the pure-projection tests.

import {
  Affordance,
  CardView,
  ClientView,
  ModuleView,
  TeamView,
  TicketView,
} from "../src/types.js";

export function ticket(over: Partial<TicketView> = {}): TicketView {
  return {
    id: "t-1",
    kind: "feature",
    tasks_required: 4,
    tasks_done: 0,
    users: 3,
    blocked: [],
    td: [],
    ...over,
  };
}

export function emptyModule(id: string): ModuleView {
  return {
    id,
    slots: [
      { kind: "architecture", ticket_id: `${id.toLowerCase()}-arch`, trigger: null },
      { kind: "feature", ticket_id: `${id.toLowerCase()}-f1`, trigger: "event" },
      { kind: "feature", ticket_id: `${id.toLowerCase()}-f2`, trigger: "action" },
    ],
    placed: [],
    in_progress: null,
  };
}

export function team(index: number, over: Partial<TeamView> = {}): TeamView {
  return {
    team: index,
    name: index === 0 ? "Red" : "Blue",
    users_banked: 0,
    skip_turns_pending: 0,
    temp_blocked: {},
    double_users_pending: false,
    td_count: 0,
    hand: [],
    modules: [emptyModule("A"), emptyModule("B"), emptyModule("C")],
    ...over,
  };
}

export function view(over: Partial<ClientView> = {}): ClientView {
  return {
    schema: "td-game/v1",
    session: "s-1",
    seq: 0,
    status: "running",
    seat: { team: 0, index: 0, name: "Ada" },
    round: 0,
    max_rounds: 60,
    active_team: 0,
    phase: "awaiting_move",
    deadline_epoch: null,
    teams: [team(0), team(1)],
    last_events: [],
    last_roll: null,
    your_moves: [],
    result: null,
    ...over,
  };
}

export function card(over: Partial<CardView> = {}): CardView {
  return {
    id: "act-refactor",
    kind: "action",
    title: "Refactoring sprint",
    narrative: "Focused cleanup.",
    effect: [{ op: "remove_td", selector: "chosen" }],
    aha_tags: ["Repayment/Simplified"],
    consumes_turn: true,
    ...over,
  };
}

export function startAffordances(): Affordance[] {
  return ["A", "B", "C"].map((module) => ({
    type: "start_ticket" as const,
    module,
    ticket: ticket({ id: `${module.toLowerCase()}-arch`, kind: "architecture",
                     users: 0, blocked: [2, 4] }),
  }));
}
