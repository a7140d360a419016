// Guided-problem walkthrough against a live tutor service: the chunked
// board for L2.4 (P; (P ∨ Q) → (G ∧ ¬H); ¬H → J ⊢ J ∨ K), driven
// backward from the conclusion, ending in the mandatory explanation.
import { beforeAll, describe, expect, it } from "vitest";
import { TutorApp } from "../src/app";
import { TutorClient } from "../src/api";
import {
  BASE_URL,
  attemptCount,
  backwardMove,
  click,
  justifiedIds,
  modeLabel,
  mount,
  problemLabel,
  q,
  qa,
  solvePretest,
  startApp,
  waitFor,
} from "./helpers";

const PROMPT = "How did the subgoals (G ∧ ¬H), J help you derive the conclusion?";

function edgeSignature(root: HTMLElement): string[] {
  return qa(root, ".edge-list .edge")
    .map((li) => `${li.dataset.edge}:${li.dataset.rule}`)
    .sort();
}

function statementOf(root: HTMLElement, id: string): string {
  return q(root, `.node[data-node="${id}"] .statement`).textContent ?? "";
}

describe("guided problem walkthrough", () => {
  let app: TutorApp;

  beforeAll(async () => {
    app = await startApp("GPP");
    expect(problemLabel(app.root)).toContain("L1.1");
    await solvePretest(app);
    await waitFor(() => problemLabel(app.root).includes("L2.4"), "the guided problem");
  });

  it("renders two chunks with subgoal-role nodes and three question marks", () => {
    const root = app.root;
    expect(modeLabel(root)).toBe("GPP");

    const groups = qa(root, ".chunk-group[data-chunk]");
    expect(groups.map((g) => g.dataset.chunk)).toEqual(["1", "2"]);

    // subgoals wear the cyan role class; the top of each chunk column
    const subgoals = qa(root, ".node.role-subgoal").map((card) => card.dataset.node);
    expect(subgoals.sort()).toEqual(["1.C", "2.C"]);
    expect(statementOf(root, "1.C")).toBe("G ∧ ¬H");
    expect(statementOf(root, "2.C")).toBe("J");
    const firstChunk = qa(q(root, '.chunk-group[data-chunk="1"]'), ".node");
    expect(firstChunk.map((card) => card.dataset.node)).toEqual(["1.C", "1.1"]);

    // purple board frame: givens at the bottom, conclusion on top
    expect(qa(root, ".givens-row .node.role-given").map((c) => c.dataset.node)).toEqual([
      "1",
      "2",
      "3",
    ]);
    expect(q(root, ".conclusion-row .node").classList.contains("role-conclusion")).toBe(true);
    expect(statementOf(root, "C")).toBe("J ∨ K");

    // exactly the three open statements carry the question-mark affordance
    const marked = qa(root, ".question-mark").map(
      (mark) => (mark.closest(".node") as HTMLElement).dataset.node,
    );
    expect(marked.sort()).toEqual(["1.1", "2.1", "C"]);

    // provided chunk subgoals arrive already justified with labeled edges
    expect(justifiedIds(root)).toEqual(["1", "1.C", "2", "2.C", "3"]);
    expect(edgeSignature(root)).toEqual(["1.C:MP", "2.C:MP"]);
  });

  it("flashes an incorrect rule choice without changing the proof", async () => {
    const root = app.root;
    const edgesBefore = edgeSignature(root);
    const justifiedBefore = justifiedIds(root);
    expect(attemptCount(root)).toBe(0);

    await backwardMove(app, "C", "Simp", ["2.C"]);

    const banner = q(root, ".error-banner");
    expect(banner.textContent).toContain("incorrect-rule");
    expect(q(root, ".attempt-counter").textContent).toBe("attempts: 1 (1 incorrect)");
    expect(q(root, '.node[data-node="C"]').classList.contains("flash-error")).toBe(true);
    // nothing on the board moved
    expect(edgeSignature(root)).toEqual(edgesBefore);
    expect(justifiedIds(root)).toEqual(justifiedBefore);
    expect(qa(root, ".question-mark")).toHaveLength(3);

    // the first miss at the conclusion pops its backward hint unprompted
    const popup = q(root, ".hint-popup");
    expect(popup.dataset.target).toBe("C");
    expect(popup.dataset.origin).toBe("auto");
    expect(q(popup, ".hint-message").textContent).not.toBe("");
    click(root, ".hint-dismiss");
    expect(root.querySelector(".hint-popup")).toBeNull();
  });

  it("serves the next backward hint on request", async () => {
    const root = app.root;
    click(root, ".hint-button");
    await waitFor(() => root.querySelector(".hint-popup") !== null, "the requested hint");
    const popup = q(root, ".hint-popup");
    expect(popup.dataset.origin).toBe("requested");
    expect(popup.dataset.target).toBe("2.1");
    click(root, ".hint-dismiss");
  });

  it("completes the proof through the backward script", async () => {
    const root = app.root;

    await backwardMove(app, "C", "Add", ["2.C"]);
    expect(root.querySelector(".error-banner")).toBeNull(); // cleared by the correct step
    expect(edgeSignature(root)).toContain("C:Add");

    await backwardMove(app, "2.1", "Simp", ["1.C"]);
    expect(edgeSignature(root)).toContain("2.1:Simp");

    await backwardMove(app, "1.1", "Add", ["1"]);
    expect(edgeSignature(root)).toEqual(["1.1:Add", "1.C:MP", "2.1:Simp", "2.C:MP", "C:Add"]);

    expect(qa(root, ".question-mark")).toHaveLength(0);
    expect(justifiedIds(root)).toEqual(["1", "1.1", "1.C", "2", "2.1", "2.C", "3", "C"]);
    expect(q(root, ".attempt-counter").textContent).toBe("attempts: 4 (1 incorrect)");
    expect(root.querySelector(".complete-button")).not.toBeNull();
  });

  it("renders the identical canvas after a reload from served state", async () => {
    const again = new TutorApp(mount(), new TutorClient(BASE_URL));
    await again.attach(app.sessionId);
    const original = q(app.root, ".canvas").innerHTML;
    const reloaded = q(again.root, ".canvas").innerHTML;
    expect(original.length).toBeGreaterThan(200);
    expect(reloaded).toBe(original);
  });

  it("opens the mandatory explanation modal with the subgoal prompt", async () => {
    const root = app.root;
    click(root, ".complete-button");
    await waitFor(() => root.querySelector(".explanation-modal") !== null, "the explanation modal");

    expect(q(root, ".explanation-prompt").textContent).toBe(PROMPT);
    // the modal blocks every other control
    expect(root.querySelector(".rule-palette")).toBeNull();
    expect(root.querySelector(".confirm-button")).toBeNull();
    expect(root.querySelector(".hint-button")).toBeNull();
    expect(root.querySelector(".complete-button")).toBeNull();

    // an empty answer is refused locally; the modal stays up
    click(root, ".explanation-submit");
    await waitFor(() => root.querySelector(".error-banner") !== null, "the empty-answer notice");
    expect(q(root, ".error-banner").textContent).toContain("explanation is required");
    expect(root.querySelector(".explanation-modal")).not.toBeNull();

    const input = q<HTMLTextAreaElement>(root, ".explanation-input");
    input.value = "Each subgoal fed the modus ponens chain toward J ∨ K.";
    click(root, ".explanation-submit");
    await waitFor(() => problemLabel(root).includes("L2.1"), "the next problem");
  });

  it("lands on the level-2 assessment in plain problem-solving mode", () => {
    const root = app.root;
    expect(modeLabel(root)).toBe("PS");
    expect(qa(root, ".chunk-group[data-chunk]")).toHaveLength(0);
    expect(root.querySelector(".hint-button")).toBeNull(); // no help on assessments
    expect(qa(root, ".rule-button").length).toBeGreaterThanOrEqual(12);
  });
});
