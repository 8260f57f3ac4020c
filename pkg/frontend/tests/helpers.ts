/** Shared doubles for controller and acceptance tests. */
import type { ValidityPayload } from "../src/api.js";
import type { ConflictInfo, WorkbenchView } from "../src/controller.js";
import type {
  EditorRow,
  Overlay,
  StatsView,
  TreeLayout,
  VariableBars,
} from "../src/model.js";

export class RecordingView implements WorkbenchView {
  trees: { layout: TreeLayout; revision: number }[] = [];
  bars: { bars: VariableBars[]; revision: number }[] = [];
  stats: StatsView[] = [];
  editors: { beliefId: string; rows: EditorRow[]; canCommit: boolean }[] = [];
  overlays: Overlay[] = [];
  cleared = 0;
  badges: ValidityPayload[] = [];
  loadErrors: string[] = [];
  conflicts: ConflictInfo[] = [];

  renderTree(layout: TreeLayout, revision: number): void {
    this.trees.push({ layout, revision });
  }
  renderBars(bars: VariableBars[], revision: number): void {
    this.bars.push({ bars, revision });
  }
  renderStats(stats: StatsView): void {
    this.stats.push(stats);
  }
  renderEditor(beliefId: string, rows: EditorRow[], canCommit: boolean): void {
    this.editors.push({ beliefId, rows, canCommit });
  }
  paintOverlay(overlay: Overlay): void {
    this.overlays.push(overlay);
  }
  clearOverlay(): void {
    this.cleared += 1;
  }
  renderBadges(validity: ValidityPayload): void {
    this.badges.push(validity);
  }
  showLoadError(detail: string): void {
    this.loadErrors.push(detail);
  }
  clearLoadError(): void {}
  showConflict(info: ConflictInfo): void {
    this.conflicts.push(info);
  }

  lastBars(): VariableBars[] {
    return this.bars[this.bars.length - 1].bars;
  }
  lastStats(): StatsView {
    return this.stats[this.stats.length - 1];
  }
}

export function barFor(
  bars: VariableBars[],
  name: string,
  setText: string,
): { mass: number; belief: number } {
  const variable = bars.find((v) => v.name === name);
  if (!variable) throw new Error(`no bars for variable ${name}`);
  const row = variable.rows.find((r) => r.setText === setText);
  if (!row) throw new Error(`no bar row ${setText} under ${name}`);
  return row;
}
