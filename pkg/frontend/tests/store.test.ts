import { describe, expect, it } from "vitest";
import { SessionStore } from "../src/store";
import type {
  HintView,
  NodeView,
  Outcome,
  ProblemView,
  Role,
  StepResponse,
} from "../src/types";

function node(id: string, role: Role, justified = true): NodeView {
  return { id, statement: id, origin: role === "given" ? "given" : "derived", justified, role };
}

function gppView(slot = 1): ProblemView {
  return {
    session_complete: false,
    slot,
    mode: "GPP",
    nodes: [node("1", "given"), node("1.C", "subgoal"), node("C", "conclusion", false)],
  };
}

function response(outcome: Outcome, autoHint: HintView | null = null): StepResponse {
  return {
    attempt: {
      ts: 0,
      direction: "backward",
      target: "C",
      rule: "Add",
      parents: ["1.C"],
      outcome,
      kind: "derive",
      node: null,
    },
    node: null,
    complete: false,
    auto_hint: autoHint,
  };
}

describe("SessionStore", () => {
  it("keeps parent clicks in order and toggles them off on a second click", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.toggleParent("1.C");
    store.toggleParent("1");
    expect(store.gesture.parents).toEqual(["1.C", "1"]);
    store.toggleParent("1.C");
    expect(store.gesture.parents).toEqual(["1"]);
  });

  it("only justified statements can be picked as parents", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.toggleParent("C");
    expect(store.gesture.parents).toEqual([]);
  });

  it("only unjustified statements can be backward targets", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.setBackwardTarget("1.C");
    expect(store.gesture.backwardTarget).toBeNull();
    store.setBackwardTarget("C");
    expect(store.gesture.backwardTarget).toBe("C");
    store.setBackwardTarget("C"); // toggle off
    expect(store.gesture.backwardTarget).toBeNull();
  });

  it("typing a statement switches the gesture from backward to forward", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.setBackwardTarget("C");
    store.setStatement("A ∧ B");
    expect(store.gesture.backwardTarget).toBeNull();
    store.toggleParent("1");
    store.chooseRule("Conj");
    expect(store.buildStep()).toEqual({
      direction: "forward",
      rule: "Conj",
      statement: "A ∧ B",
      parents: ["1"],
    });
  });

  it("builds a backward step when a target is marked", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.setBackwardTarget("C");
    store.toggleParent("1.C");
    store.chooseRule("Add");
    expect(store.canConfirm()).toBe(true);
    expect(store.buildStep()).toEqual({
      direction: "backward",
      target: "C",
      rule: "Add",
      parents: ["1.C"],
    });
  });

  it("requires a rule, a parent, and a target or statement before confirming", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    expect(store.canConfirm()).toBe(false);
    store.setBackwardTarget("C");
    expect(store.canConfirm()).toBe(false);
    store.toggleParent("1.C");
    expect(store.canConfirm()).toBe(false);
    store.chooseRule("Add");
    expect(store.canConfirm()).toBe(true);
  });

  it("counts attempts, keeps the gesture on a miss, and clears it on success", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.setBackwardTarget("C");
    store.toggleParent("1.C");
    store.chooseRule("Simp");
    const sent = store.buildStep();

    store.recordStep(sent, response("incorrect-rule"));
    expect(store.attempts).toBe(1);
    expect(store.incorrect).toBe(1);
    expect(store.lastError?.nodes).toEqual(["C"]);
    expect(store.gesture.backwardTarget).toBe("C"); // the student can adjust and retry

    store.chooseRule("Simp");
    store.chooseRule("Add");
    store.recordStep(store.buildStep(), response("correct"));
    expect(store.attempts).toBe(2);
    expect(store.incorrect).toBe(1);
    expect(store.lastError).toBeNull();
    expect(store.gesture).toEqual({ parents: [], rule: null, backwardTarget: null, statement: "" });
  });

  it("anchors forward-miss flashes at the chosen parents", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    store.toggleParent("1");
    store.chooseRule("Conj");
    store.setStatement("A ∧ B");
    store.recordStep(store.buildStep(), response("incorrect-statement"));
    expect(store.lastError?.nodes).toEqual(["1"]);
  });

  it("captures unprompted hints from a step response", () => {
    const store = new SessionStore();
    store.applyView(gppView());
    const hint: HintView = { order: 0, target: "C", rule: "Add", message: "m", origin: "auto" };
    store.recordStep(
      { direction: "backward", target: "C", rule: "Simp", parents: ["1.C"] },
      response("incorrect-rule", hint),
    );
    expect(store.hint).toEqual(hint);
    store.dismissHint();
    expect(store.hint).toBeNull();
  });

  it("resets counters and gesture when the slot changes, not on a refresh", () => {
    const store = new SessionStore();
    store.applyView(gppView(1));
    store.toggleParent("1.C");
    store.recordStep(
      { direction: "backward", target: "C", rule: "Simp", parents: ["1.C"] },
      response("incorrect-rule"),
    );
    store.applyView(gppView(1)); // same slot: a plain refetch
    expect(store.attempts).toBe(1);
    expect(store.gesture.parents).toEqual(["1.C"]);

    store.applyView(gppView(2)); // next problem
    expect(store.attempts).toBe(0);
    expect(store.incorrect).toBe(0);
    expect(store.lastError).toBeNull();
    expect(store.gesture.parents).toEqual([]);
  });

  it("goes inert in worked-example mode and while an explanation is pending", () => {
    const store = new SessionStore();
    store.applyView({ ...gppView(), mode: "WE" });
    store.toggleParent("1.C");
    store.chooseRule("Add");
    expect(store.gesture.parents).toEqual([]);
    expect(store.gesture.rule).toBeNull();

    store.applyView({ ...gppView(), awaiting_explanation: true });
    store.setBackwardTarget("C");
    expect(store.gesture.backwardTarget).toBeNull();
  });
});
