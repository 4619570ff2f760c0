// Wire protocol types (td-game/v1). Mirrors docs/protocol.md; the server is
// the sole rules authority and the client renders only what a view contains.

export const WIRE_SCHEMA = "td-game/v1";

export type Digit = 1 | 2 | 3 | 4 | 5 | 6;

export type TicketKind = "architecture" | "feature";
export type CardDeck = "event" | "action";
export type SessionStatus = "lobby" | "running" | "finished";

export interface TicketView {
  id: string;
  kind: TicketKind;
  tasks_required: number;
  tasks_done: number;
  users: number;
  blocked: number[];
  td: number[];
  effective_blocked?: number[]; // in-progress tickets only
}

export interface SlotView {
  kind: TicketKind;
  ticket_id: string;
  trigger: CardDeck | null;
}

export interface ModuleView {
  id: string;
  slots: SlotView[];
  placed: TicketView[];
  in_progress: TicketView | null;
}

export interface EffectView {
  op: string;
  selector?: string;
  digit?: number;
  rounds?: number;
  target_team?: string;
}

export interface CardView {
  id: string;
  kind: CardDeck;
  title: string;
  narrative: string;
  effect: EffectView[];
  aha_tags: string[];
  consumes_turn: boolean;
}

export interface TeamView {
  team: number;
  name: string;
  users_banked: number;
  skip_turns_pending: number;
  temp_blocked: Record<string, number>;
  double_users_pending: boolean;
  td_count: number;
  hand: CardView[];
  modules: ModuleView[];
}

export interface GameEventView {
  seq: number;
  round: number;
  team: number | null;
  kind: string;
  data: Record<string, unknown>;
  aha: string[];
}

export interface RollView {
  first: number;
  second: number;
  for: "work" | "repayment";
  team: number | null;
  module: string | null;
}

export interface SeatView {
  team: number;
  index: number;
  name: string;
}

export interface ResultView {
  scores: [number, number];
  winner: number | null;
  reason: string;
}

export interface WorkAffordance {
  type: "work";
  module: string;
  effective_blocked: number[];
  incur_options: number[];
}

export interface RepayAffordance {
  type: "repay";
  module: string;
  ticket: number; // placed row index, -1 = in progress
  digit: number;
  threshold: number;
}

export interface TicketRefWire {
  module: string;
  ticket: number;
  digit?: number;
}

export interface PlayActionAffordance {
  type: "play_action";
  card: string;
  required_bindings: ("digit" | "target")[];
  binding_targets: TicketRefWire[];
  digit_choices: number[];
}

export interface StartTicketAffordance {
  type: "start_ticket";
  module: string;
  ticket: TicketView;
}

export type Affordance =
  | WorkAffordance
  | RepayAffordance
  | PlayActionAffordance
  | StartTicketAffordance;

export interface ClientView {
  schema: string;
  session: string;
  seq: number;
  status: SessionStatus;
  seat: SeatView;
  round: number;
  max_rounds: number;
  active_team: number;
  phase: string;
  deadline_epoch: number | null;
  teams: [TeamView, TeamView];
  last_events: GameEventView[];
  last_roll: RollView | null;
  your_moves: Affordance[];
  result: ResultView | null;
}

// Outgoing moves.
export interface MoveBindings {
  digit?: number;
  target?: TicketRefWire;
}

export type Move =
  | { type: "work"; module: string; incur: number[] }
  | { type: "repay"; module: string; ticket: number; digit: number }
  | { type: "play_action"; card: string; bindings: MoveBindings }
  | { type: "start_ticket"; module: string };

export interface Rejection {
  code: string;
  reason: string;
}

export interface CreatedSession {
  schema: string;
  session_id: string;
  join_tokens: [string[], string[]];
  config: Record<string, unknown>;
}
