// DOM-level drivers for the tutor UI. Every interaction goes through the
// rendered elements (clicks and input events), never through the store
// directly, so the tests exercise the same paths a student would.
import { TutorClient } from "../src/api";
import { TutorApp } from "../src/app";

export const BASE_URL = process.env.TUTOR_BASE_URL ?? "http://127.0.0.1:8931";

let students = 0;

export function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.append(root);
  return root;
}

export async function startApp(condition: "Control" | "GPP"): Promise<TutorApp> {
  const app = new TutorApp(mount(), new TutorClient(BASE_URL));
  students += 1;
  await app.start(`ui-${condition.toLowerCase()}-${Date.now()}-${students}`, condition);
  return app;
}

export function q<T extends HTMLElement = HTMLElement>(root: ParentNode, selector: string): T {
  const found = root.querySelector(selector);
  if (!found) throw new Error(`no element matches ${selector}`);
  return found as T;
}

export function qa(root: ParentNode, selector: string): HTMLElement[] {
  return [...root.querySelectorAll(selector)] as HTMLElement[];
}

export function click(root: ParentNode, selector: string): void {
  q(root, selector).click();
}

export async function waitFor(
  check: () => boolean,
  label: string,
  timeoutMs = 10_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 20));
  }
  throw new Error(`timed out waiting for ${label}`);
}

export function attemptCount(root: HTMLElement): number {
  const text = q(root, ".attempt-counter").textContent ?? "";
  const match = /attempts: (\d+)/.exec(text);
  if (!match) throw new Error(`unreadable attempt counter: ${text}`);
  return Number(match[1]);
}

export function problemLabel(root: HTMLElement): string {
  return q(root, ".problem-label").textContent ?? "";
}

export function modeLabel(root: HTMLElement): string {
  return q(root, ".mode-label").textContent ?? "";
}

export function justifiedIds(root: HTMLElement): string[] {
  return qa(root, '.node[data-justified="true"]')
    .map((card) => card.dataset.node ?? "")
    .sort();
}

export function typeStatement(root: HTMLElement, text: string): void {
  const input = q<HTMLInputElement>(root, ".statement-input");
  input.value = text;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

// Unwinds any leftover selection through the same click-to-toggle
// affordances a student would use. Each click re-renders, so elements
// are re-queried one at a time.
export function resetGesture(root: HTMLElement): void {
  for (;;) {
    const selected = root.querySelector<HTMLElement>(".node.selected");
    if (!selected) break;
    selected.click();
  }
  const rule = root.querySelector<HTMLElement>(".rule-button.selected");
  if (rule) rule.click();
  const marked = root.querySelector<HTMLElement>(".node.backward-target .question-mark");
  if (marked) marked.click();
  const input = root.querySelector<HTMLInputElement>(".statement-input");
  if (input && input.value) typeStatement(root, "");
}

async function submitGesture(root: HTMLElement): Promise<void> {
  const before = attemptCount(root);
  click(root, ".confirm-button");
  await waitFor(() => attemptCount(root) === before + 1, "the attempt to round-trip");
}

export async function forwardMove(
  app: TutorApp,
  parents: string[],
  rule: string,
  statement: string,
): Promise<void> {
  const root = app.root;
  resetGesture(root);
  for (const id of parents) click(root, `.node[data-node="${id}"]`);
  click(root, `.rule-button[data-rule="${rule}"]`);
  typeStatement(root, statement);
  await submitGesture(root);
}

export async function backwardMove(
  app: TutorApp,
  target: string,
  rule: string,
  parents: string[],
): Promise<void> {
  const root = app.root;
  resetGesture(root);
  click(root, `.node[data-node="${target}"] .question-mark`);
  for (const id of parents) click(root, `.node[data-node="${id}"]`);
  click(root, `.rule-button[data-rule="${rule}"]`);
  await submitGesture(root);
}

export async function finishProblem(app: TutorApp): Promise<void> {
  const root = app.root;
  const label = problemLabel(root);
  await waitFor(() => root.querySelector(".complete-button") !== null, "the finish affordance");
  click(root, ".complete-button");
  await waitFor(
    () =>
      root.querySelector(".session-done") !== null ||
      root.querySelector(".explanation-modal") !== null ||
      problemLabel(root) !== label,
    "the problem to close out",
  );
}

// Clears the opening pretest slot (L1.1 in the test curriculum:
// K, L, (L ∧ K) → M ⊢ M ∨ N) so a test can reach the level-2 training
// slot, where the session's condition decides the mode.
export async function solvePretest(app: TutorApp): Promise<void> {
  await forwardMove(app, ["2", "1"], "Conj", "L ∧ K");
  await forwardMove(app, ["4", "3"], "MP", "M");
  await forwardMove(app, ["5"], "Add", "M ∨ N");
  await finishProblem(app);
}
