// Payload shapes of the tutor-service HTTP API. The UI never interprets
// logic itself: these are projections of server state, rendered as-is.

export type Mode = "WE" | "PS" | "GPP";
export type Role = "given" | "conclusion" | "subgoal" | "member" | "derived";
export type Outcome = "correct" | "incorrect-rule" | "incorrect-statement";

export interface RuleInfo {
  id: string;
  name: string;
  arity: number;
  kind: "inference" | "equivalence";
}

export interface NodeView {
  id: string;
  statement: string;
  origin: string;
  justified: boolean;
  role: Role;
  justification?: { rule: string; parents: string[] };
}

export interface ChunkView {
  index: number;
  members: string[];
  subgoal: string;
}

export interface ScoreRecord {
  slot: number;
  problem_id: string;
  level: number;
  phase: string;
  mode: Mode;
  elapsed: number;
  value: number;
}

export interface ProblemView {
  session_complete: boolean;
  scores?: ScoreRecord[];
  slot?: number;
  total_slots?: number;
  problem_id?: string;
  level?: number;
  phase?: string;
  mode?: Mode;
  premises?: string[];
  conclusion?: string;
  nodes?: NodeView[];
  complete?: boolean;
  help_allowed?: boolean;
  awaiting_explanation?: boolean;
  explanation_prompt?: string;
  chunks?: ChunkView[];
  unjustified?: string[];
  steps_revealed?: number;
  steps_total?: number;
}

export interface StepRequest {
  direction: "forward" | "backward" | "advance";
  rule?: string;
  statement?: string;
  target?: string;
  parents?: string[];
}

export interface AttemptView {
  ts: number;
  direction: string;
  target: string;
  rule: string;
  parents: string[];
  outcome: Outcome;
  kind: string;
  node: string | null;
}

export interface HintView {
  order: number;
  target: string;
  rule: string;
  message: string;
  origin: "requested" | "auto";
}

export interface StepResponse {
  attempt: AttemptView;
  node: NodeView | null;
  complete: boolean;
  auto_hint: HintView | null;
}

export interface CompleteResponse {
  score: ScoreRecord;
  session_complete: boolean;
  explanation_prompt?: string;
}

export interface SessionInfo {
  session_id: string;
  student_id: string;
  seed: number;
  total_slots: number;
}
