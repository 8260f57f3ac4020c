/** Orchestrates the service client and the view.
 *
 * All inference state lives on the server; this class only tracks the
 * session id, the last revision it rendered, and the last dirty payload
 * so the overlay can be compared verbatim with what the server sent.
 */
import {
  ApiClient,
  ApiRequestError,
  type CreateResponse,
  type DirtyPayload,
  type DocumentFocalEntry,
  type NetworkDocument,
  type UpdateResponse,
  type ValidityPayload,
} from "./api.js";
import {
  commitAllowed,
  editorRows,
  layoutTree,
  marginalBars,
  overlayFromDirty,
  overlayFromValidity,
  statsView,
  type EditorRow,
  type Overlay,
  type StatsView,
  type TreeLayout,
  type VariableBars,
} from "./model.js";

export interface ConflictInfo {
  node: string[] | null;
  detail: string;
  phase: string | null;
}

export interface WorkbenchView {
  renderTree(layout: TreeLayout, revision: number): void;
  renderBars(bars: VariableBars[], revision: number): void;
  renderStats(stats: StatsView): void;
  renderEditor(beliefId: string, rows: EditorRow[], canCommit: boolean): void;
  paintOverlay(overlay: Overlay): void;
  clearOverlay(): void;
  renderBadges(validity: ValidityPayload): void;
  showLoadError(detail: string): void;
  clearLoadError(): void;
  showConflict(info: ConflictInfo): void;
}

export class WorkbenchController {
  sessionId: string | null = null;
  revision = 0;
  /** the last dirty payload the server sent, kept verbatim */
  lastDirty: DirtyPayload | null = null;
  document: NetworkDocument | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly view: WorkbenchView,
  ) {}

  async loadNetwork(document: NetworkDocument, root?: string[]): Promise<CreateResponse | null> {
    this.view.clearLoadError();
    let created: CreateResponse;
    try {
      created = await this.api.createSession(document, root);
    } catch (error) {
      if (error instanceof ApiRequestError) {
        this.view.showLoadError(error.payload.detail);
        return null;
      }
      throw error;
    }
    this.sessionId = created.session;
    this.document = structuredClone(document);
    this.revision = created.revision;
    this.lastDirty = null;
    this.view.renderTree(layoutTree(created.tree), created.revision);
    this.view.renderBars(marginalBars(created.variables), created.revision);
    // a fresh session has run exactly one full propagation, so both
    // stats numbers start out equal
    this.view.renderStats(
      statsView(
        created.revision,
        2 * created.tree.edges.length,
        created.combinations.total,
        created.combinations.total,
      ),
    );
    return created;
  }

  /** Focal list of a belief as the session currently knows it. */
  currentFocal(beliefId: string): DocumentFocalEntry[] {
    if (this.document === null) throw new Error("no document loaded");
    const belief = this.document.beliefs.find((b) => b.id === beliefId);
    if (!belief) throw new Error(`no belief ${beliefId}`);
    return structuredClone(belief.focal);
  }

  openEditor(beliefId: string): EditorRow[] {
    const rows = editorRows(this.currentFocal(beliefId));
    this.view.renderEditor(beliefId, rows, commitAllowed(rows));
    return rows;
  }

  editorChanged(beliefId: string, rows: EditorRow[]): void {
    this.view.renderEditor(beliefId, rows, commitAllowed(rows));
  }

  private requireSession(): string {
    if (this.sessionId === null) throw new Error("no active session");
    return this.sessionId;
  }

  /** Ask the server what a change would invalidate; paints the overlay. */
  async previewEdit(beliefId: string, focal: DocumentFocalEntry[]): Promise<UpdateResponse> {
    const response = await this.api.updateBelief(
      this.requireSession(),
      beliefId,
      focal,
      true,
    );
    this.lastDirty = response.dirty;
    this.view.paintOverlay(overlayFromDirty(response.dirty));
    return response;
  }

  /**
   * Apply a change.  Returns the server response, or null when the
   * editor state refuses to commit (mass sum off by more than 1e-9).
   */
  async commitEdit(
    beliefId: string,
    focal: DocumentFocalEntry[],
  ): Promise<UpdateResponse | null> {
    const rows = editorRows(focal);
    if (!commitAllowed(rows)) {
      this.view.renderEditor(beliefId, rows, false);
      return null;
    }
    let response: UpdateResponse;
    try {
      response = await this.api.updateBelief(this.requireSession(), beliefId, focal);
    } catch (error) {
      if (error instanceof ApiRequestError && error.payload.error === "total-conflict") {
        this.view.showConflict({
          node: error.payload.node ?? null,
          detail: error.payload.detail,
          phase: error.payload.phase ?? null,
        });
        return null;
      }
      throw error;
    }

    this.lastDirty = response.dirty;
    if (response.noop) {
      // nothing was discarded; show the all-reused overlay and a
      // zero-cost run without touching the rendered marginals
      this.view.paintOverlay(overlayFromDirty(response.dirty));
      this.view.renderStats(
        statsView(response.revision, response.messages, 0, 0),
      );
      return response;
    }

    // marginal bars re-render only because the revision advanced
    if (response.revision > this.revision) {
      this.revision = response.revision;
      if (this.document) {
        const belief = this.document.beliefs.find((b) => b.id === beliefId);
        if (belief) belief.focal = structuredClone(focal);
      }
      this.view.renderBars(marginalBars(response.variables ?? []), response.revision);
      this.view.renderStats(
        statsView(
          response.revision,
          response.messages,
          response.combinations?.total ?? 0,
          response.freshRun?.total ?? 0,
        ),
      );
      this.view.clearOverlay();
    }
    return response;
  }

  async refreshValidity(): Promise<ValidityPayload> {
    const validity = await this.api.getValidity(this.requireSession());
    this.view.renderBadges(validity);
    this.view.paintOverlay(overlayFromValidity(validity));
    return validity;
  }

  async refreshStats(): Promise<void> {
    const stats = await this.api.getStats(this.requireSession());
    this.view.renderStats(
      statsView(
        stats.revision,
        stats.messages,
        stats.lastRun?.total ?? 0,
        stats.freshTotal,
      ),
    );
  }
}
