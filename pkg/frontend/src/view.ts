/** DOM renderer for the workbench.
 *
 * The view is passive: it paints whatever the controller hands it and
 * wires input events back through callbacks set by main.ts.  Everything
 * is keyed the same way the view models are (scope labels, message keys,
 * prefix keys) so overlay and badge updates are direct lookups.
 */
import type { ValidityPayload } from "./api.js";
import {
  editorSum,
  prefixKey,
  scopeLabel,
  type EditorRow,
  type Overlay,
  type StatsView,
  type TreeLayout,
  type VariableBars,
} from "./model.js";
import type { ConflictInfo, WorkbenchView } from "./controller.js";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(value: number): string {
  return value.toFixed(6);
}

export interface EditorCallbacks {
  onMassInput(beliefId: string, rows: EditorRow[]): void;
  onPreview(beliefId: string, rows: EditorRow[]): void;
  onCommit(beliefId: string, rows: EditorRow[]): void;
}

export class DomView implements WorkbenchView {
  private readonly errorBox: HTMLElement;
  private readonly treeBox: HTMLElement;
  private readonly messagesBox: HTMLElement;
  private readonly barsBox: HTMLElement;
  private readonly editorBox: HTMLElement;
  private readonly statsBox: HTMLElement;
  private readonly modal: HTMLElement;
  private readonly modalBody: HTMLElement;

  private messageEls = new Map<string, HTMLElement>();
  private collectedBadges = new Map<string, HTMLElement>();
  private prefixBadges = new Map<string, HTMLElement>();

  editorCallbacks: EditorCallbacks | null = null;

  constructor(container: HTMLElement) {
    this.errorBox = el("div", "load-error hidden");
    container.appendChild(this.errorBox);

    const grid = el("div", "panels");
    container.appendChild(grid);

    const treePanel = el("section", "panel tree-panel");
    treePanel.appendChild(el("h2", undefined, "markov tree"));
    this.treeBox = el("div", "tree");
    treePanel.appendChild(this.treeBox);
    grid.appendChild(treePanel);

    const messagesPanel = el("section", "panel messages-panel");
    messagesPanel.appendChild(el("h2", undefined, "messages"));
    this.messagesBox = el("div", "messages");
    messagesPanel.appendChild(this.messagesBox);
    grid.appendChild(messagesPanel);

    const barsPanel = el("section", "panel bars-panel");
    barsPanel.appendChild(el("h2", undefined, "marginals"));
    this.barsBox = el("div", "bars");
    barsPanel.appendChild(this.barsBox);
    grid.appendChild(barsPanel);

    const editorPanel = el("section", "panel editor-panel");
    editorPanel.appendChild(el("h2", undefined, "prior editor"));
    this.editorBox = el("div", "editor");
    editorPanel.appendChild(this.editorBox);
    grid.appendChild(editorPanel);

    const statsPanel = el("section", "panel stats-panel");
    statsPanel.appendChild(el("h2", undefined, "combination counts"));
    this.statsBox = el("div", "stats");
    statsPanel.appendChild(this.statsBox);
    grid.appendChild(statsPanel);

    this.modal = el("div", "conflict-modal hidden");
    const card = el("div", "conflict-card");
    card.appendChild(el("h2", undefined, "total conflict"));
    this.modalBody = el("div", "conflict-body");
    card.appendChild(this.modalBody);
    const dismiss = el("button", "conflict-dismiss", "keep session") as HTMLButtonElement;
    dismiss.addEventListener("click", () => this.modal.classList.add("hidden"));
    card.appendChild(dismiss);
    this.modal.appendChild(card);
    container.appendChild(this.modal);
  }

  renderTree(layout: TreeLayout, revision: number): void {
    this.treeBox.textContent = "";
    this.treeBox.dataset.revision = String(revision);
    this.collectedBadges.clear();
    this.prefixBadges.clear();

    for (const row of layout.rows) {
      const rowEl = el("div", "tree-row");
      for (const node of row) {
        const chip = el("span", "node");
        if (node.root) chip.classList.add("root");
        if (node.synthetic) chip.classList.add("synthetic");
        chip.dataset.scope = node.label;
        chip.appendChild(el("span", "node-label", node.label));
        if (node.synthetic) chip.appendChild(el("span", "node-tag", "synthetic"));

        const badges = el("span", "badges");
        const collected = el("span", "badge collected valid", "coll");
        collected.title = `collected cache at ${node.label}`;
        badges.appendChild(collected);
        this.collectedBadges.set(node.label, collected);
        for (const childIndex of node.childIndexes) {
          const child = layout.nodes[childIndex];
          const badge = el("span", "badge prefix valid", `pre ${child.label}`);
          badge.title = `prefix cache at ${node.label} toward ${child.label}`;
          badges.appendChild(badge);
          this.prefixBadges.set(prefixKey(node.scope, child.scope), badge);
        }
        chip.appendChild(badges);
        rowEl.appendChild(chip);
      }
      this.treeBox.appendChild(rowEl);
    }

    this.messagesBox.textContent = "";
    this.messageEls.clear();
    for (const message of layout.messages) {
      const line = el(
        "div",
        "message",
        `${scopeLabel(message.from)} -> ${scopeLabel(message.to)} (${message.direction})`,
      );
      line.dataset.key = message.key;
      this.messagesBox.appendChild(line);
      this.messageEls.set(message.key, line);
    }
  }

  renderBars(bars: VariableBars[], revision: number): void {
    this.barsBox.textContent = "";
    this.barsBox.dataset.revision = String(revision);
    for (const variable of bars) {
      const block = el("div", "variable");
      block.dataset.name = variable.name;
      block.appendChild(el("h3", undefined, variable.name));
      for (const row of variable.rows) {
        const rowEl = el("div", "bar-row");
        rowEl.dataset.set = row.setText;
        rowEl.appendChild(el("span", "bar-set", row.setText));
        const track = el("div", "bar-track");
        const fill = el("div", "bar-fill");
        fill.style.width = `${row.percent}%`;
        track.appendChild(fill);
        rowEl.appendChild(track);
        rowEl.appendChild(el("span", "bar-mass", `m=${fmt(row.mass)}`));
        rowEl.appendChild(el("span", "bar-belief", `Bel=${fmt(row.belief)}`));
        block.appendChild(rowEl);
      }
      this.barsBox.appendChild(block);
    }
  }

  renderStats(stats: StatsView): void {
    this.statsBox.textContent = "";
    this.statsBox.dataset.revision = String(stats.revision);
    const lines = [
      `revision ${stats.revision}`,
      `messages ${stats.messages}`,
      `re-propagation: ${stats.repropTotal} combinations`,
      `fresh run: ${stats.freshTotal} combinations`,
      `saved: ${stats.saved}`,
    ];
    for (const line of lines) {
      this.statsBox.appendChild(el("div", "stat-line", line));
    }
  }

  renderEditor(beliefId: string, rows: EditorRow[], canCommit: boolean): void {
    this.editorBox.textContent = "";
    const box = el("div", "editor-belief");
    box.dataset.belief = beliefId;
    box.appendChild(el("h3", undefined, beliefId));

    const working = rows.map((row) => ({ ...row }));
    for (let i = 0; i < working.length; i += 1) {
      const row = working[i];
      const rowEl = el("div", "editor-row");
      rowEl.appendChild(el("span", "editor-set", row.setText));
      const input = document.createElement("input");
      input.type = "number";
      input.step = "0.01";
      input.className = "editor-mass";
      input.value = String(row.mass);
      const index = i;
      input.addEventListener("input", () => {
        working[index].mass = Number(input.value);
        this.editorCallbacks?.onMassInput(beliefId, working);
      });
      rowEl.appendChild(input);
      box.appendChild(rowEl);
    }

    const sum = editorSum(working);
    const sumEl = el("div", `editor-sum ${canCommit ? "ok" : "off"}`, `sum ${fmt(sum)}`);
    box.appendChild(sumEl);

    const previewBtn = el("button", "editor-preview", "preview") as HTMLButtonElement;
    previewBtn.addEventListener("click", () =>
      this.editorCallbacks?.onPreview(beliefId, working),
    );
    box.appendChild(previewBtn);

    const commitBtn = el("button", "editor-commit", "commit") as HTMLButtonElement;
    commitBtn.disabled = !canCommit;
    commitBtn.addEventListener("click", () =>
      this.editorCallbacks?.onCommit(beliefId, working),
    );
    box.appendChild(commitBtn);

    this.editorBox.appendChild(box);
  }

  paintOverlay(overlay: Overlay): void {
    for (const [key, element] of this.messageEls) {
      element.classList.remove("discarded", "reused");
      element.classList.add(overlay.discardedMessages.has(key) ? "discarded" : "reused");
    }
    for (const [label, badge] of this.collectedBadges) {
      const invalid = overlay.invalidCollected.has(label);
      badge.classList.toggle("invalid", invalid);
      badge.classList.toggle("valid", !invalid);
    }
    for (const [key, badge] of this.prefixBadges) {
      const invalid = overlay.invalidPrefixes.has(key);
      badge.classList.toggle("invalid", invalid);
      badge.classList.toggle("valid", !invalid);
    }
  }

  clearOverlay(): void {
    for (const element of this.messageEls.values()) {
      element.classList.remove("discarded", "reused");
    }
    for (const badge of this.collectedBadges.values()) {
      badge.classList.remove("invalid");
      badge.classList.add("valid");
    }
    for (const badge of this.prefixBadges.values()) {
      badge.classList.remove("invalid");
      badge.classList.add("valid");
    }
  }

  renderBadges(validity: ValidityPayload): void {
    for (const node of validity.nodes) {
      const label = scopeLabel(node.scope);
      const collected = this.collectedBadges.get(label);
      if (collected) {
        collected.classList.toggle("invalid", !node.collectedValid);
        collected.classList.toggle("valid", node.collectedValid);
      }
      for (const prefix of node.prefixes) {
        const badge = this.prefixBadges.get(prefixKey(node.scope, prefix.child));
        if (badge) {
          badge.classList.toggle("invalid", !prefix.valid);
          badge.classList.toggle("valid", prefix.valid);
        }
      }
    }
  }

  showLoadError(detail: string): void {
    this.errorBox.textContent = detail;
    this.errorBox.classList.remove("hidden");
  }

  clearLoadError(): void {
    this.errorBox.textContent = "";
    this.errorBox.classList.add("hidden");
  }

  showConflict(info: ConflictInfo): void {
    this.modalBody.textContent = "";
    if (info.node) {
      this.modalBody.appendChild(
        el("div", "conflict-node", `node ${scopeLabel(info.node)}`),
      );
    }
    if (info.phase) {
      this.modalBody.appendChild(el("div", "conflict-phase", `phase ${info.phase}`));
    }
    this.modalBody.appendChild(el("div", "conflict-detail", info.detail));
    this.modal.classList.remove("hidden");
  }
}
