import type { HintView, ProblemView, StepRequest, StepResponse } from "./types";

export interface ErrorFlash {
  message: string;
  nodes: string[]; // node ids whose cards flash
}

// In-progress gesture: click-to-toggle parent selection plus a rule pick,
// resolved as backward when a question mark set the target, forward when
// a statement was typed instead.
export interface Gesture {
  parents: string[];
  rule: string | null;
  backwardTarget: string | null;
  statement: string;
}

const emptyGesture = (): Gesture => ({
  parents: [],
  rule: null,
  backwardTarget: null,
  statement: "",
});

export class SessionStore {
  view: ProblemView | null = null;
  gesture: Gesture = emptyGesture();
  attempts = 0; // derivation attempts on the current problem
  incorrect = 0;
  lastError: ErrorFlash | null = null;
  hint: HintView | null = null;

  private slotKey: number | null = null;

  node(id: string) {
    return this.view?.nodes?.find((n) => n.id === id);
  }

  applyView(view: ProblemView): void {
    const slot = view.session_complete ? null : (view.slot ?? null);
    if (slot !== this.slotKey) {
      // new problem: gesture, counters, and chrome start fresh
      this.gesture = emptyGesture();
      this.attempts = 0;
      this.incorrect = 0;
      this.lastError = null;
      this.hint = null;
      this.slotKey = slot;
    }
    this.view = view;
  }

  get interactive(): boolean {
    return (
      this.view !== null &&
      !this.view.session_complete &&
      this.view.mode !== "WE" &&
      !this.view.awaiting_explanation
    );
  }

  toggleParent(id: string): void {
    if (!this.interactive) return;
    const node = this.node(id);
    if (!node || !node.justified) return; // only proven statements can justify
    const at = this.gesture.parents.indexOf(id);
    if (at >= 0) this.gesture.parents.splice(at, 1);
    else this.gesture.parents.push(id);
  }

  setBackwardTarget(id: string): void {
    if (!this.interactive) return;
    const node = this.node(id);
    if (!node || node.justified) return;
    this.gesture.backwardTarget = this.gesture.backwardTarget === id ? null : id;
    this.gesture.statement = "";
  }

  chooseRule(rule: string): void {
    if (!this.interactive) return;
    this.gesture.rule = this.gesture.rule === rule ? null : rule;
  }

  setStatement(text: string): void {
    if (!this.interactive) return;
    this.gesture.statement = text;
    if (text.trim()) this.gesture.backwardTarget = null;
  }

  canConfirm(): boolean {
    const g = this.gesture;
    if (!this.interactive || !g.rule || g.parents.length === 0) return false;
    return g.backwardTarget !== null || g.statement.trim() !== "";
  }

  buildStep(): StepRequest {
    const g = this.gesture;
    if (g.backwardTarget !== null) {
      return {
        direction: "backward",
        target: g.backwardTarget,
        rule: g.rule ?? undefined,
        parents: [...g.parents],
      };
    }
    return {
      direction: "forward",
      rule: g.rule ?? undefined,
      statement: g.statement,
      parents: [...g.parents],
    };
  }

  recordStep(sent: StepRequest, response: StepResponse): void {
    this.attempts += 1;
    if (response.attempt.outcome === "correct") {
      this.gesture = emptyGesture();
      this.lastError = null;
    } else {
      this.incorrect += 1;
      const anchor =
        sent.direction === "backward" && sent.target
          ? [sent.target]
          : (sent.parents ?? []);
      this.lastError = {
        message: `${response.attempt.outcome}: ${sent.rule ?? "?"} does not justify this step`,
        nodes: anchor,
      };
    }
    if (response.auto_hint) this.hint = response.auto_hint;
  }

  showHint(hint: HintView): void {
    this.hint = hint;
  }

  clearError(): void {
    this.lastError = null;
  }

  dismissHint(): void {
    this.hint = null;
  }

  flashError(message: string, nodes: string[] = []): void {
    this.lastError = { message, nodes };
  }
}
