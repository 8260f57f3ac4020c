/** Pure transforms from service payloads to view models.
 *
 * Nothing here recomputes inference results: the overlay, badges, bars
 * and stats are all read straight off the server's payloads.
 */
import type {
  DirtyPayload,
  DocumentFocalEntry,
  FocalSet,
  TreePayload,
  ValidityPayload,
  VariableEntry,
} from "./api.js";

export const MASS_SUM_TOLERANCE = 1e-9;

export function scopeLabel(names: string[]): string {
  return `{${names.join(",")}}`;
}

export function setLabel(set: FocalSet): string {
  if (set === "*") return "*";
  return set
    .map((config) =>
      Object.keys(config)
        .sort()
        .map((name) => `${name}=${config[name]}`)
        .join(","),
    )
    .map((piece) => `(${piece})`)
    .join(" ");
}

// -- tree layout --------------------------------------------------------------

export interface LayoutNode {
  index: number;
  scope: string[];
  label: string;
  synthetic: boolean;
  root: boolean;
  depth: number;
  parentIndex: number | null;
  childIndexes: number[];
}

export interface LayoutMessage {
  from: string[];
  to: string[];
  direction: "up" | "down";
  key: string;
}

export interface TreeLayout {
  rows: LayoutNode[][];
  nodes: LayoutNode[];
  messages: LayoutMessage[];
}

export function messageKey(from: string[], to: string[], direction: string): string {
  return `${scopeLabel(from)}>${scopeLabel(to)}:${direction}`;
}

/** Layer the rooted tree by depth, keeping the engine's sibling order. */
export function layoutTree(tree: TreePayload): TreeLayout {
  const nodes: LayoutNode[] = tree.nodes.map((node, index) => ({
    index,
    scope: node.scope,
    label: scopeLabel(node.scope),
    synthetic: node.synthetic,
    root: index === tree.root,
    depth: 0,
    parentIndex: node.parent,
    childIndexes: node.children,
  }));

  const rows: LayoutNode[][] = [];
  let frontier = [nodes[tree.root]];
  let depth = 0;
  while (frontier.length > 0) {
    rows.push(frontier);
    const next: LayoutNode[] = [];
    for (const node of frontier) {
      node.depth = depth;
      for (const childIndex of node.childIndexes) {
        next.push(nodes[childIndex]);
      }
    }
    frontier = next;
    depth += 1;
  }

  const messages: LayoutMessage[] = [];
  for (const node of nodes) {
    if (node.parentIndex === null) continue;
    const parent = nodes[node.parentIndex];
    messages.push({
      from: node.scope,
      to: parent.scope,
      direction: "up",
      key: messageKey(node.scope, parent.scope, "up"),
    });
    messages.push({
      from: parent.scope,
      to: node.scope,
      direction: "down",
      key: messageKey(parent.scope, node.scope, "down"),
    });
  }
  return { rows, nodes, messages };
}

// -- invalidation overlay -----------------------------------------------------

export interface Overlay {
  discardedMessages: Set<string>;
  invalidCollected: Set<string>;
  invalidPrefixes: Set<string>;
  messageCount: number;
}

export function prefixKey(parent: string[], child: string[]): string {
  return `${scopeLabel(parent)}|${scopeLabel(child)}`;
}

/** Map the server's dirty payload one-to-one onto overlay keys. */
export function overlayFromDirty(dirty: DirtyPayload): Overlay {
  const discarded = new Set<string>();
  for (const [from, to] of dirty.upMessages) {
    discarded.add(messageKey(from, to, "up"));
  }
  for (const [from, to] of dirty.downMessages) {
    discarded.add(messageKey(from, to, "down"));
  }
  return {
    discardedMessages: discarded,
    invalidCollected: new Set(dirty.collected.map(scopeLabel)),
    invalidPrefixes: new Set(dirty.prefixes.map(([a, b]) => prefixKey(a, b))),
    messageCount: dirty.messageCount,
  };
}

export function overlayFromValidity(validity: ValidityPayload): Overlay {
  return overlayFromDirty(validity.pending);
}

// -- marginal bars ------------------------------------------------------------

export interface BarRow {
  setText: string;
  mass: number;
  belief: number;
  percent: number;
}

export interface VariableBars {
  name: string;
  rows: BarRow[];
}

export function marginalBars(variables: VariableEntry[]): VariableBars[] {
  return variables.map((entry) => ({
    name: entry.name,
    rows: entry.focal.map((focal) => ({
      setText: setLabel(focal.set),
      mass: focal.mass,
      belief: focal.belief,
      percent: Math.max(0, Math.min(100, focal.mass * 100)),
    })),
  }));
}

// -- prior editor -------------------------------------------------------------

export interface EditorRow {
  setText: string;
  set: FocalSet;
  mass: number;
}

export function editorRows(focal: DocumentFocalEntry[]): EditorRow[] {
  return focal.map((entry) => ({
    setText: setLabel(entry.set),
    set: entry.set,
    mass: entry.mass,
  }));
}

export function editorSum(rows: EditorRow[]): number {
  return rows.reduce((acc, row) => acc + row.mass, 0);
}

export function commitAllowed(rows: EditorRow[]): boolean {
  return Math.abs(editorSum(rows) - 1.0) <= MASS_SUM_TOLERANCE;
}

export function rowsToFocal(rows: EditorRow[]): DocumentFocalEntry[] {
  return rows.map((row) => ({ set: row.set, mass: row.mass }));
}

// -- stats panel --------------------------------------------------------------

export interface StatsView {
  revision: number;
  messages: number;
  repropTotal: number;
  freshTotal: number;
  saved: number;
}

export function statsView(
  revision: number,
  messages: number,
  repropTotal: number,
  freshTotal: number,
): StatsView {
  return {
    revision,
    messages,
    repropTotal,
    freshTotal,
    saved: freshTotal - repropTotal,
  };
}
