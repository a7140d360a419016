import { layoutBoard } from "./layout";
import type { Gesture, SessionStore } from "./store";
import type { NodeView, ProblemView, RuleInfo } from "./types";

export interface BoardHandlers {
  onNodeClick(id: string): void;
  onQuestionMark(id: string): void;
  onRulePick(rule: string): void;
  onStatementInput(text: string): void;
  onConfirm(): void;
  onAdvance(): void;
  onHintRequest(): void;
  onHintDismiss(): void;
  onCompleteProblem(): void;
  onExplanationSubmit(text: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function nodeCard(
  doc: Document,
  node: NodeView,
  view: ProblemView,
  gesture: Gesture,
  flashed: Set<string>,
  handlers: BoardHandlers,
): HTMLElement {
  const card = el(doc, "div", `node role-${node.role}`);
  card.dataset.node = node.id;
  card.dataset.justified = String(node.justified);
  if (gesture.parents.includes(node.id)) card.classList.add("selected");
  if (gesture.backwardTarget === node.id) card.classList.add("backward-target");
  if (flashed.has(node.id)) card.classList.add("flash-error");

  const label = el(doc, "span", "node-id", node.id);
  const statement = el(doc, "span", "statement", node.statement);
  card.append(label, statement);

  if (node.justified && node.justification) {
    card.append(el(doc, "span", "rule-badge", node.justification.rule));
  }
  if (!node.justified && view.mode !== "WE") {
    const mark = el(doc, "button", "question-mark", "?");
    mark.type = "button";
    mark.title = `justify ${node.id}`;
    mark.addEventListener("click", (event) => {
      event.stopPropagation();
      handlers.onQuestionMark(node.id);
    });
    card.append(mark);
  }
  card.addEventListener("click", () => handlers.onNodeClick(node.id));
  return card;
}

function renderCanvas(
  doc: Document,
  view: ProblemView,
  store: SessionStore,
  handlers: BoardHandlers,
): HTMLElement {
  const canvas = el(doc, "div", "canvas");
  const byId = new Map((view.nodes ?? []).map((n) => [n.id, n]));
  const flashed = new Set(store.lastError?.nodes ?? []);
  const plan = layoutBoard(view);

  if (plan.conclusion) {
    const row = el(doc, "div", "conclusion-row");
    row.append(nodeCard(doc, byId.get(plan.conclusion)!, view, store.gesture, flashed, handlers));
    canvas.append(row);
  }

  const groupsRow = el(doc, "div", "groups-row");
  for (const group of plan.groups) {
    const column = el(doc, "div", "chunk-group");
    column.dataset.group = group.key;
    if (group.chunk !== null) {
      column.dataset.chunk = String(group.chunk);
      column.append(el(doc, "div", "chunk-label", `subgoal ${group.chunk}`));
    }
    for (const id of group.rows) {
      const node = byId.get(id);
      if (node) column.append(nodeCard(doc, node, view, store.gesture, flashed, handlers));
    }
    groupsRow.append(column);
  }
  canvas.append(groupsRow);

  const givensRow = el(doc, "div", "givens-row");
  for (const id of plan.givens) {
    givensRow.append(nodeCard(doc, byId.get(id)!, view, store.gesture, flashed, handlers));
  }
  canvas.append(givensRow);

  // justification edges, each labeled with its rule
  const edges = el(doc, "ul", "edge-list");
  for (const node of view.nodes ?? []) {
    if (!node.justification) continue;
    const edge = el(
      doc,
      "li",
      "edge",
      `${node.id} ⟸ ${node.justification.rule}(${node.justification.parents.join(", ")})`,
    );
    edge.dataset.edge = node.id;
    edge.dataset.rule = node.justification.rule;
    edges.append(edge);
  }
  canvas.append(edges);
  return canvas;
}

function renderControls(
  doc: Document,
  view: ProblemView,
  store: SessionStore,
  rules: RuleInfo[],
  handlers: BoardHandlers,
): HTMLElement {
  const controls = el(doc, "div", "controls");

  if (view.mode === "WE") {
    const progress = el(
      doc,
      "span",
      "we-progress",
      `${view.steps_revealed ?? 0} / ${view.steps_total ?? 0} steps`,
    );
    const advance = el(doc, "button", "advance-button", ">");
    advance.type = "button";
    advance.addEventListener("click", () => handlers.onAdvance());
    controls.append(progress, advance);
  } else {
    const palette = el(doc, "div", "rule-palette");
    for (const rule of rules) {
      const button = el(doc, "button", "rule-button", rule.id);
      button.type = "button";
      button.dataset.rule = rule.id;
      button.title = `${rule.name} (${rule.arity} premise${rule.arity > 1 ? "s" : ""})`;
      if (store.gesture.rule === rule.id) button.classList.add("selected");
      button.addEventListener("click", () => handlers.onRulePick(rule.id));
      palette.append(button);
    }
    controls.append(palette);

    const entry = el(doc, "div", "statement-entry");
    const input = el(doc, "input", "statement-input");
    input.type = "text";
    input.placeholder = "derive a statement…";
    input.value = store.gesture.statement;
    input.addEventListener("input", () => handlers.onStatementInput(input.value));
    const confirm = el(doc, "button", "confirm-button", "apply");
    confirm.type = "button";
    confirm.disabled = !store.canConfirm();
    confirm.addEventListener("click", () => handlers.onConfirm());
    entry.append(input, confirm);
    controls.append(entry);
  }

  if (view.help_allowed) {
    const hint = el(doc, "button", "hint-button", "hint");
    hint.type = "button";
    hint.addEventListener("click", () => handlers.onHintRequest());
    controls.append(hint);
  }
  if (view.complete && !view.awaiting_explanation) {
    const done = el(doc, "button", "complete-button", "finish problem");
    done.type = "button";
    done.addEventListener("click", () => handlers.onCompleteProblem());
    controls.append(done);
  }
  return controls;
}

function renderHint(doc: Document, store: SessionStore, handlers: BoardHandlers): HTMLElement {
  const popup = el(doc, "div", "hint-popup");
  const hint = store.hint!;
  popup.dataset.target = hint.target;
  popup.dataset.origin = hint.origin;
  popup.append(el(doc, "p", "hint-message", hint.message));
  const dismiss = el(doc, "button", "hint-dismiss", "got it");
  dismiss.type = "button";
  dismiss.addEventListener("click", () => handlers.onHintDismiss());
  popup.append(dismiss);
  return popup;
}

function renderExplanationModal(
  doc: Document,
  view: ProblemView,
  handlers: BoardHandlers,
): HTMLElement {
  const modal = el(doc, "div", "explanation-modal");
  modal.append(el(doc, "p", "explanation-prompt", view.explanation_prompt ?? ""));
  const input = el(doc, "textarea", "explanation-input");
  const submit = el(doc, "button", "explanation-submit", "submit");
  submit.type = "button";
  submit.addEventListener("click", () => handlers.onExplanationSubmit(input.value));
  modal.append(input, submit);
  return modal;
}

export function renderBoard(
  root: HTMLElement,
  view: ProblemView,
  store: SessionStore,
  rules: RuleInfo[],
  handlers: BoardHandlers,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.classList.add("tutor-board");

  if (view.session_complete) {
    const done = el(doc, "div", "session-done");
    done.append(
      el(doc, "h2", undefined, "Session complete"),
      el(doc, "p", "score-count", `${view.scores?.length ?? 0} problems scored`),
    );
    root.append(done);
    return;
  }

  const status = el(doc, "div", "status-bar");
  status.append(
    el(doc, "span", "problem-label", `${view.problem_id} — level ${view.level}, ${view.phase}`),
    el(doc, "span", "mode-label", view.mode ?? ""),
    el(doc, "span", "slot-label", `problem ${(view.slot ?? 0) + 1} of ${view.total_slots}`),
    el(doc, "span", "attempt-counter", `attempts: ${store.attempts} (${store.incorrect} incorrect)`),
  );
  root.append(status);

  if (store.lastError) {
    root.append(el(doc, "div", "error-banner", store.lastError.message));
  }

  root.append(renderCanvas(doc, view, store, handlers));

  if (view.awaiting_explanation) {
    root.classList.add("modal-open");
    root.append(renderExplanationModal(doc, view, handlers));
    return; // the modal blocks every other control
  }
  root.classList.remove("modal-open");

  root.append(renderControls(doc, view, store, rules, handlers));
  if (store.hint) root.append(renderHint(doc, store, handlers));
}
