import { describe, expect, test } from "vitest";
import type { DirtyPayload, TreePayload, VariableEntry } from "../src/api.js";
import {
  commitAllowed,
  editorRows,
  editorSum,
  layoutTree,
  marginalBars,
  messageKey,
  overlayFromDirty,
  overlayFromValidity,
  prefixKey,
  rowsToFocal,
  scopeLabel,
  setLabel,
  statsView,
} from "../src/model.js";

const CHAIN_TREE: TreePayload = {
  nodes: [
    { scope: ["a"], synthetic: false, parent: 1, children: [] },
    { scope: ["a", "b"], synthetic: false, parent: null, children: [0, 2] },
    { scope: ["b"], synthetic: true, parent: 1, children: [] },
  ],
  edges: [
    [0, 1],
    [2, 1],
  ],
  root: 1,
};

describe("labels", () => {
  test("scope label joins names in braces", () => {
    expect(scopeLabel(["a", "b"])).toBe("{a,b}");
    expect(scopeLabel(["a"])).toBe("{a}");
  });

  test("set label spells out configurations with sorted keys", () => {
    expect(setLabel("*")).toBe("*");
    expect(setLabel([{ b: "1", a: "0" }])).toBe("(a=0,b=1)");
    expect(setLabel([{ a: "1" }, { a: "0" }])).toBe("(a=1) (a=0)");
  });
});

describe("tree layout", () => {
  test("layers by depth with the root on the first row", () => {
    const layout = layoutTree(CHAIN_TREE);
    expect(layout.rows.length).toBe(2);
    expect(layout.rows[0].map((n) => n.label)).toEqual(["{a,b}"]);
    expect(layout.rows[1].map((n) => n.label)).toEqual(["{a}", "{b}"]);
    expect(layout.rows[0][0].root).toBe(true);
    expect(layout.rows[1][0].root).toBe(false);
  });

  test("keeps the server's sibling order", () => {
    const tree: TreePayload = {
      nodes: [
        { scope: ["x"], synthetic: false, parent: null, children: [2, 1] },
        { scope: ["x", "y"], synthetic: false, parent: 0, children: [] },
        { scope: ["x", "z"], synthetic: false, parent: 0, children: [] },
      ],
      edges: [
        [1, 0],
        [2, 0],
      ],
      root: 0,
    };
    const layout = layoutTree(tree);
    expect(layout.rows[1].map((n) => n.label)).toEqual(["{x,z}", "{x,y}"]);
  });

  test("marks synthetic nodes and records depth", () => {
    const layout = layoutTree(CHAIN_TREE);
    const byLabel = new Map(layout.nodes.map((n) => [n.label, n]));
    expect(byLabel.get("{b}")?.synthetic).toBe(true);
    expect(byLabel.get("{a}")?.synthetic).toBe(false);
    expect(byLabel.get("{a,b}")?.depth).toBe(0);
    expect(byLabel.get("{b}")?.depth).toBe(1);
  });

  test("derives one up and one down message per edge", () => {
    const layout = layoutTree(CHAIN_TREE);
    const keys = layout.messages.map((m) => m.key).sort();
    expect(keys).toEqual(
      [
        "{a}>{a,b}:up",
        "{a,b}>{a}:down",
        "{b}>{a,b}:up",
        "{a,b}>{b}:down",
      ].sort(),
    );
  });
});

describe("invalidation overlay", () => {
  const dirty: DirtyPayload = {
    upMessages: [[["a"], ["a", "b"]]],
    downMessages: [[["a", "b"], ["b"]]],
    collected: [["a"], ["a", "b"]],
    prefixes: [[["a", "b"], ["b"]]],
    messageCount: 2,
  };

  test("maps the server dirty payload one to one", () => {
    const overlay = overlayFromDirty(dirty);
    expect(overlay.discardedMessages).toEqual(
      new Set(["{a}>{a,b}:up", "{a,b}>{b}:down"]),
    );
    expect(overlay.invalidCollected).toEqual(new Set(["{a}", "{a,b}"]));
    expect(overlay.invalidPrefixes).toEqual(new Set(["{a,b}|{b}"]));
    expect(overlay.messageCount).toBe(2);
  });

  test("round-trips every dirty entry into a unique key", () => {
    const overlay = overlayFromDirty(dirty);
    for (const [from, to] of dirty.upMessages) {
      expect(overlay.discardedMessages.has(messageKey(from, to, "up"))).toBe(true);
    }
    for (const [from, to] of dirty.downMessages) {
      expect(overlay.discardedMessages.has(messageKey(from, to, "down"))).toBe(true);
    }
    expect(overlay.discardedMessages.size).toBe(
      dirty.upMessages.length + dirty.downMessages.length,
    );
  });

  test("an empty dirty payload paints nothing as discarded", () => {
    const overlay = overlayFromDirty({
      upMessages: [],
      downMessages: [],
      collected: [],
      prefixes: [],
      messageCount: 0,
    });
    expect(overlay.discardedMessages.size).toBe(0);
    expect(overlay.invalidCollected.size).toBe(0);
    expect(overlay.invalidPrefixes.size).toBe(0);
  });

  test("validity overlay reads the pending dirty set", () => {
    const overlay = overlayFromValidity({
      clean: false,
      edges: [],
      nodes: [],
      pending: dirty,
      revision: 3,
    });
    expect(overlay.discardedMessages.has("{a}>{a,b}:up")).toBe(true);
  });

  test("prefix keys name the parent and the child", () => {
    expect(prefixKey(["a", "b"], ["b"])).toBe("{a,b}|{b}");
  });
});

describe("marginal bars", () => {
  const variables: VariableEntry[] = [
    {
      name: "b",
      focal: [
        { set: [{ b: "1" }], mass: 0.42, belief: 0.42 },
        { set: "*", mass: 0.58, belief: 1.0 },
      ],
    },
  ];

  test("carries mass and belief per focal set", () => {
    const bars = marginalBars(variables);
    expect(bars.length).toBe(1);
    expect(bars[0].name).toBe("b");
    expect(bars[0].rows[0]).toEqual({
      setText: "(b=1)",
      mass: 0.42,
      belief: 0.42,
      percent: 42,
    });
    expect(bars[0].rows[1].setText).toBe("*");
    expect(bars[0].rows[1].belief).toBe(1.0);
  });

  test("clamps bar widths to the 0..100 range", () => {
    const bars = marginalBars([
      { name: "x", focal: [{ set: "*", mass: 1.2, belief: 1.0 }] },
    ]);
    expect(bars[0].rows[0].percent).toBe(100);
  });
});

describe("prior editor", () => {
  test("rows preserve the focal sets and masses", () => {
    const rows = editorRows([
      { set: [{ a: "1" }], mass: 0.6 },
      { set: "*", mass: 0.4 },
    ]);
    expect(rows.map((r) => r.setText)).toEqual(["(a=1)", "*"]);
    expect(editorSum(rows)).toBeCloseTo(1.0, 12);
    expect(rowsToFocal(rows)).toEqual([
      { set: [{ a: "1" }], mass: 0.6 },
      { set: "*", mass: 0.4 },
    ]);
  });

  test("commit is allowed exactly within 1e-9 of unit mass", () => {
    const base = [
      { setText: "(a=1)", set: [{ a: "1" }], mass: 0.6 },
      { setText: "*", set: "*" as const, mass: 0.4 },
    ];
    expect(commitAllowed(base)).toBe(true);
    const nudged = [...base.slice(0, 1), { ...base[1], mass: 0.4 + 5e-10 }];
    expect(commitAllowed(nudged)).toBe(true);
    const off = [...base.slice(0, 1), { ...base[1], mass: 0.4 + 2e-9 }];
    expect(commitAllowed(off)).toBe(false);
    const wayOff = [...base.slice(0, 1), { ...base[1], mass: 0.3 }];
    expect(commitAllowed(wayOff)).toBe(false);
  });
});

describe("stats view", () => {
  test("reports the fresh-run saving", () => {
    const stats = statsView(4, 10, 12, 16);
    expect(stats).toEqual({
      revision: 4,
      messages: 10,
      repropTotal: 12,
      freshTotal: 16,
      saved: 4,
    });
  });
});
