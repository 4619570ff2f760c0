// Pure projections from a ClientView to render models. Everything here is
// deterministic and DOM-free: the render layer draws these models verbatim,
// and the tests compare them across clients. No game rule is evaluated
// client-side; blocked/workable flags come straight from the view.

import {
  Affordance,
  CardView,
  ClientView,
  GameEventView,
  ModuleView,
  Move,
  PlayActionAffordance,
  TicketView,
} from "./types.js";

export interface DigitModel {
  digit: number;
  printedBlocked: boolean; // crossed out on the printed ticket
  td: boolean; // red tile
  blockedNow: boolean; // dependency union, in-progress tickets only
}

export interface TicketModel {
  id: string;
  kind: string;
  users: number;
  circles: boolean[]; // one per required task, true = filled
  digits: DigitModel[];
  workableDigits: number[]; // in-progress only: digits that can complete a task
}

export interface SlotModel {
  kind: string;
  trigger: string | null;
  state: "placed" | "in-progress" | "empty";
  ticket: TicketModel | null;
}

export interface ModuleModel {
  id: string;
  complete: boolean;
  slots: SlotModel[];
}

export interface TeamModel {
  team: number;
  name: string;
  usersBanked: number;
  tdCount: number;
  skipPending: number;
  tempBlocked: { digit: number; rounds: number }[];
  doubleUsersPending: boolean;
  hand: CardView[];
  modules: ModuleModel[];
  isActive: boolean;
}

export interface TallyModel {
  scores: [number, number];
  winnerName: string | null; // null = draw
  reason: string;
}

// Everything every seat must agree on after each push.
export interface PublicBoardModel {
  seq: number;
  status: string;
  round: number;
  maxRounds: number;
  activeTeam: number;
  lastRoll: string | null;
  teams: [TeamModel, TeamModel];
  tally: TallyModel | null;
}

export interface BoardModel extends PublicBoardModel {
  yourTeam: number;
  banner: string;
  clock: string;
  actions: ActionModel[];
  feed: string[];
}

export function ticketModel(ticket: TicketView): TicketModel {
  const printed = new Set(ticket.blocked);
  const tiles = new Set(ticket.td);
  const blockedNow = new Set(ticket.effective_blocked ?? []);
  const digits: DigitModel[] = [];
  for (let d = 1; d <= 6; d += 1) {
    digits.push({
      digit: d,
      printedBlocked: printed.has(d),
      td: tiles.has(d),
      blockedNow: blockedNow.has(d),
    });
  }
  const workable = ticket.effective_blocked === undefined
    ? []
    : digits.filter((d) => !d.blockedNow).map((d) => d.digit);
  return {
    id: ticket.id,
    kind: ticket.kind,
    users: ticket.users,
    circles: Array.from({ length: ticket.tasks_required },
                        (_, i) => i < ticket.tasks_done),
    digits,
    workableDigits: workable,
  };
}

function moduleModel(module: ModuleView): ModuleModel {
  const slots: SlotModel[] = module.slots.map((slot, index) => {
    const placed = module.placed[index];
    if (placed !== undefined) {
      return { kind: slot.kind, trigger: slot.trigger, state: "placed" as const,
               ticket: ticketModel(placed) };
    }
    if (index === module.placed.length && module.in_progress !== null) {
      return { kind: slot.kind, trigger: slot.trigger,
               state: "in-progress" as const,
               ticket: ticketModel(module.in_progress) };
    }
    return { kind: slot.kind, trigger: slot.trigger, state: "empty" as const,
             ticket: null };
  });
  return {
    id: module.id,
    complete: module.placed.length === module.slots.length,
    slots,
  };
}

export function publicBoardModel(view: ClientView): PublicBoardModel {
  const teams = view.teams.map((team) => ({
    team: team.team,
    name: team.name,
    usersBanked: team.users_banked,
    tdCount: team.td_count,
    skipPending: team.skip_turns_pending,
    tempBlocked: Object.entries(team.temp_blocked)
      .map(([digit, rounds]) => ({ digit: Number(digit), rounds }))
      .sort((a, b) => a.digit - b.digit),
    doubleUsersPending: team.double_users_pending,
    hand: team.hand,
    modules: team.modules.map(moduleModel),
    isActive: view.status === "running" && view.active_team === team.team,
  })) as [TeamModel, TeamModel];

  let tally: TallyModel | null = null;
  if (view.result !== null) {
    tally = {
      scores: view.result.scores,
      winnerName: view.result.winner === null
        ? null
        : view.teams[view.result.winner].name,
      reason: view.result.reason,
    };
  }
  return {
    seq: view.seq,
    status: view.status,
    round: view.round,
    maxRounds: view.max_rounds,
    activeTeam: view.active_team,
    lastRoll: view.last_roll === null
      ? null
      : `${view.last_roll.first} & ${view.last_roll.second}`,
    teams,
    tally,
  };
}

export function boardModel(view: ClientView): BoardModel {
  const base = publicBoardModel(view);
  let banner: string;
  if (view.status === "lobby") {
    banner = "Waiting for all players to join…";
  } else if (view.status === "finished") {
    banner = base.tally?.winnerName === null
      ? "Game over: draw"
      : `Game over: ${base.tally?.winnerName} wins`;
  } else if (view.active_team === view.seat.team) {
    banner = "Your team's turn";
  } else {
    banner = `${view.teams[view.active_team].name}'s turn`;
  }
  return {
    ...base,
    yourTeam: view.seat.team,
    banner,
    clock: `round ${view.round} / ${view.max_rounds}`,
    actions: actionModels(view),
    feed: view.last_events.map((event) => describeEvent(view, event))
      .filter((line) => line !== ""),
  };
}

// ---------------------------------------------------------------------------
// affordances -> submittable actions

export interface ActionModel {
  kind: "work" | "repay" | "play_action" | "start_ticket";
  label: string;
  // ready-to-send move; for work the incur list is composed from toggles,
  // for cards with choices the bindings come from the prompt
  move: Move;
  incurOptions?: number[];
  prompt?: CardPromptSpec;
}

export function actionModels(view: ClientView): ActionModel[] {
  return view.your_moves.map((affordance) => toAction(view, affordance));
}

function toAction(view: ClientView, affordance: Affordance): ActionModel {
  switch (affordance.type) {
    case "work":
      return {
        kind: "work",
        label: `Work on module ${affordance.module}`,
        move: { type: "work", module: affordance.module, incur: [] },
        incurOptions: affordance.incur_options,
      };
    case "repay":
      return {
        kind: "repay",
        label: `Repay TD on ${affordance.module}` +
          `[${affordance.ticket === -1 ? "wip" : affordance.ticket}]` +
          ` digit ${affordance.digit} (needs ${affordance.threshold}+)`,
        move: { type: "repay", module: affordance.module,
                ticket: affordance.ticket, digit: affordance.digit },
      };
    case "play_action": {
      const card = findCard(view, affordance.card);
      return {
        kind: "play_action",
        label: `Play: ${card?.title ?? affordance.card}`,
        move: { type: "play_action", card: affordance.card, bindings: {} },
        prompt: card ? cardPromptSpec(card, affordance) : undefined,
      };
    }
    case "start_ticket":
      return {
        kind: "start_ticket",
        label: `Start ${affordance.ticket.kind} ticket on module ` +
          `${affordance.module} (${affordance.ticket.tasks_required} tasks` +
          `${affordance.ticket.users ? `, ${affordance.ticket.users} users` : ""})`,
        move: { type: "start_ticket", module: affordance.module },
      };
  }
}

export function composeWork(action: ActionModel, incur: number[]): Move {
  if (action.move.type !== "work") {
    throw new Error("not a work action");
  }
  const legal = new Set(action.incurOptions ?? []);
  const chosen = incur.filter((digit) => legal.has(digit));
  return { ...action.move, incur: chosen };
}

function findCard(view: ClientView, cardId: string): CardView | undefined {
  return view.teams[view.seat.team].hand.find((card) => card.id === cardId);
}

// ---------------------------------------------------------------------------
// card prompts

export interface CardPromptSpec {
  cardId: string;
  title: string;
  narrative: string;
  ahaTags: string[]; // shown as a learning cue
  needsDigit: boolean;
  digitChoices: number[];
  needsTarget: boolean;
  targets: { module: string; ticket: number; digit: number; label: string }[];
  noopNote: string | null; // set when a required target does not exist
}

export function cardPromptSpec(card: CardView,
                               affordance: PlayActionAffordance): CardPromptSpec {
  const needsDigit = affordance.required_bindings.includes("digit");
  const needsTarget = affordance.required_bindings.includes("target");
  const targets = affordance.binding_targets
    .filter((ref) => ref.digit !== undefined)
    .map((ref) => ({
      module: ref.module,
      ticket: ref.ticket,
      digit: ref.digit as number,
      label: `${ref.module}[${ref.ticket === -1 ? "wip" : ref.ticket}] ` +
        `digit ${ref.digit}`,
    }));
  return {
    cardId: card.id,
    title: card.title,
    narrative: card.narrative,
    ahaTags: card.aha_tags,
    needsDigit,
    digitChoices: affordance.digit_choices,
    needsTarget,
    targets,
    noopNote: needsTarget && targets.length === 0
      ? "No debt on the board: this effect would do nothing."
      : null,
  };
}

export interface PromptSelections {
  digit?: number;
  target?: { module: string; ticket: number; digit: number };
}

export function collectBindings(
  spec: CardPromptSpec,
  selections: PromptSelections,
): { move: Move } | { error: string } {
  const bindings: { digit?: number; target?: { module: string; ticket: number; digit: number } } = {};
  if (spec.needsDigit) {
    if (selections.digit === undefined) {
      return { error: "pick a digit" };
    }
    if (!spec.digitChoices.includes(selections.digit)) {
      return { error: `digit ${selections.digit} is not available` };
    }
    bindings.digit = selections.digit;
  }
  if (spec.needsTarget) {
    if (selections.target === undefined) {
      return { error: "pick a TD tile" };
    }
    bindings.target = selections.target;
  }
  return { move: { type: "play_action", card: spec.cardId, bindings } };
}

// ---------------------------------------------------------------------------
// narrative feed

export function describeEvent(view: ClientView, event: GameEventView): string {
  const who = event.team === null ? "" : view.teams[event.team].name;
  const d = event.data as Record<string, any>;
  switch (event.kind) {
    case "move_accepted":
      return "";
    case "dice_rolled":
      return `${who} rolled ${d.first} & ${d.second}` +
        (d.for === "repayment" ? " for repayment" : ` (work on ${d.module})`);
    case "task_completed":
      return `${who} completed ${d.count > 1 ? `${d.count} tasks` : "a task"}` +
        ` on ${d.ticket_id} (${d.tasks_done}/${d.tasks_required})`;
    case "td_incurred":
      return `${who} incurred TD on digit ${d.digit} of ${d.ticket_id}` +
        (d.conscious ? " (conscious)" : d.via === "card" ? " (card)" : " (double)");
    case "td_repaid":
      return `${who} repaid TD on digit ${d.digit} of ${d.ticket_id}`;
    case "repayment_failed":
      return `${who} failed to repay digit ${d.digit} of ${d.ticket_id}`;
    case "ticket_completed":
      return `${who} completed ${d.ticket_id}` +
        (d.users_awarded ? ` (+${d.users_awarded} users${d.doubled ? ", doubled" : ""})` : "");
    case "ticket_started":
      return `${who} started ${d.ticket_id} on module ${d.module}`;
    case "card_drawn":
      return `${who} drew ${d.deck === "event" ? "?" : "!"} card: ${d.title}`;
    case "effect_applied":
      return d.applied ? "" : `…no effect (${d.detail})`;
    case "no_progress":
      return `${who} made no progress on ${d.module}`;
    case "turn_skipped":
      return `${who} skips a turn`;
    case "deck_reshuffled":
      return `${d.deck} deck reshuffled`;
    case "deck_empty":
      return `${d.deck} deck is empty`;
    case "score_tallied":
      return `${who}: ${d.users} users − ${d.td_count} TD = ${d.score}`;
    case "game_ended":
      return `Game over (${d.reason})`;
    default:
      return "";
  }
}
