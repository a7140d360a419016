import { ApiError, TutorClient } from "./api";
import { renderBoard, type BoardHandlers } from "./board";
import { SessionStore } from "./store";
import type { RuleInfo, StepRequest } from "./types";

// One tab, one session. Every mutation round-trips through the service
// and re-renders from fetched state; nothing is drawn optimistically.
export class TutorApp {
  readonly store = new SessionStore();
  sessionId = "";
  private rules: RuleInfo[] = [];
  private handlers: BoardHandlers;

  constructor(
    readonly root: HTMLElement,
    readonly client: TutorClient,
  ) {
    this.handlers = {
      onNodeClick: (id) => {
        this.store.toggleParent(id);
        this.render();
      },
      onQuestionMark: (id) => {
        this.store.setBackwardTarget(id);
        this.render();
      },
      onRulePick: (rule) => {
        this.store.chooseRule(rule);
        this.render();
      },
      onStatementInput: (text) => {
        this.store.setStatement(text);
        this.render();
      },
      onConfirm: () => void this.confirm(),
      onAdvance: () => void this.advance(),
      onHintRequest: () => void this.requestHint(),
      onHintDismiss: () => {
        this.store.dismissHint();
        this.render();
      },
      onCompleteProblem: () => void this.completeProblem(),
      onExplanationSubmit: (text) => void this.submitExplanation(text),
    };
  }

  async start(studentId: string, condition: "Control" | "GPP", seed?: number): Promise<void> {
    this.rules = await this.client.rules();
    const session = await this.client.createSession(studentId, seed);
    this.sessionId = session.session_id;
    this.store.applyView(await this.client.assignCondition(this.sessionId, condition));
    this.render();
  }

  // Resume an existing session purely from served state (page reload).
  async attach(sessionId: string): Promise<void> {
    this.rules = await this.client.rules();
    this.sessionId = sessionId;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    this.store.applyView(await this.client.problem(this.sessionId));
    this.render();
  }

  render(): void {
    if (!this.store.view) return;
    renderBoard(this.root, this.store.view, this.store, this.rules, this.handlers);
  }

  async confirm(): Promise<void> {
    if (!this.store.canConfirm()) return;
    await this.submitStep(this.store.buildStep());
  }

  // Sends any step request; the service is the sole judge of validity.
  async submitStep(step: StepRequest): Promise<void> {
    try {
      const response = await this.client.step(this.sessionId, step);
      this.store.recordStep(step, response);
      if (response.attempt.outcome === "correct") {
        await this.refresh();
      } else {
        this.render();
      }
    } catch (err) {
      this.surface(err);
    }
  }

  async advance(): Promise<void> {
    try {
      await this.client.step(this.sessionId, { direction: "advance" });
      this.store.clearError();
      await this.refresh();
    } catch (err) {
      this.surface(err);
    }
  }

  async requestHint(): Promise<void> {
    try {
      const { hint } = await this.client.hint(this.sessionId);
      this.store.showHint(hint);
      this.render();
    } catch (err) {
      this.surface(err);
    }
  }

  async completeProblem(): Promise<void> {
    try {
      await this.client.complete(this.sessionId);
      await this.refresh();
    } catch (err) {
      this.surface(err);
    }
  }

  async submitExplanation(text: string): Promise<void> {
    if (!text.trim()) {
      this.store.flashError("an explanation is required before moving on");
      this.render();
      return;
    }
    try {
      await this.client.explanation(this.sessionId, text);
      await this.refresh();
    } catch (err) {
      this.surface(err);
    }
  }

  private surface(err: unknown): void {
    if (err instanceof ApiError) {
      this.store.flashError(err.message);
      this.render();
      return;
    }
    throw err;
  }
}
