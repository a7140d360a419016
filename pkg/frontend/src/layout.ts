import type { ProblemView } from "./types";

// The board's spatial arrangement: conclusion on top, derivations in
// vertical groups beneath it (one group per chunk when the problem is
// chunked, a single group otherwise), givens along the bottom.
export interface LayoutGroup {
  key: string;
  chunk: number | null;
  rows: string[]; // node ids, top to bottom
}

export interface BoardLayout {
  conclusion: string | null;
  groups: LayoutGroup[];
  givens: string[];
}

export function layoutBoard(view: ProblemView): BoardLayout {
  const nodes = view.nodes ?? [];
  const conclusion = nodes.find((n) => n.role === "conclusion")?.id ?? null;
  const givens = nodes.filter((n) => n.role === "given").map((n) => n.id);

  if (view.chunks && view.chunks.length > 0) {
    const groups = [...view.chunks]
      .sort((a, b) => a.index - b.index)
      .map((chunk) => ({
        key: `chunk-${chunk.index}`,
        chunk: chunk.index,
        // members arrive in expert order with the subgoal last; the board
        // reads upward, so reversing puts the subgoal on top
        rows: [...chunk.members].reverse(),
      }));
    return { conclusion, groups, givens };
  }

  const middle = nodes
    .filter((n) => n.role !== "given" && n.role !== "conclusion")
    .map((n) => n.id);
  middle.reverse(); // payload order is derivation order; newest on top
  const groups = middle.length > 0 ? [{ key: "main", chunk: null, rows: middle }] : [];
  return { conclusion, groups, givens };
}
