/** Typed client for the workbench service.
 *
 * The fetch function is injected so tests can fake the transport; every
 * method returns the parsed JSON body or throws ApiRequestError carrying
 * the service's error payload verbatim.
 */

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export type FocalSet = "*" | Record<string, string>[];

export interface FocalEntry {
  set: FocalSet;
  mass: number;
  belief: number;
}

export interface DocumentFocalEntry {
  set: FocalSet;
  mass: number;
}

export interface MarginalEntry {
  scope: string[];
  synthetic: boolean;
  focal: FocalEntry[];
}

export interface VariableEntry {
  name: string;
  focal: FocalEntry[];
}

export interface TreeNodePayload {
  scope: string[];
  synthetic: boolean;
  parent: number | null;
  children: number[];
}

export interface TreePayload {
  nodes: TreeNodePayload[];
  edges: [number, number][];
  root: number;
}

export interface CounterPayload {
  setup: number;
  up: number;
  down: number;
  total: number;
  perNode: { scope: string[]; count: number }[];
}

/** Edge lists are [fromScope, toScope] pairs of variable-name lists. */
export type EdgeList = [string[], string[]][];

export interface DirtyPayload {
  upMessages: EdgeList;
  downMessages: EdgeList;
  collected: string[][];
  prefixes: EdgeList;
  messageCount: number;
}

export interface DeltaChange {
  set: FocalSet;
  from: number;
  to: number;
  delta: number;
  fromBelief: number;
  toBelief: number;
}

export interface DeltaEntry {
  name: string;
  changes: DeltaChange[];
}

export interface CreateResponse {
  session: string;
  revision: number;
  tree: TreePayload;
  combinations: CounterPayload;
  marginals: MarginalEntry[];
  variables: VariableEntry[];
}

export interface UpdateResponse {
  revision: number;
  preview: boolean;
  noop: boolean;
  dirty: DirtyPayload;
  messages: number;
  combinations?: CounterPayload;
  freshRun?: CounterPayload;
  deltas?: DeltaEntry[];
  marginals?: MarginalEntry[];
  variables?: VariableEntry[];
}

export interface ValidityEdge {
  from: string[];
  to: string[];
  direction: "up" | "down";
  valid: boolean;
}

export interface ValidityNode {
  scope: string[];
  collectedValid: boolean;
  prefixes: { child: string[]; valid: boolean }[];
}

export interface ValidityPayload {
  clean: boolean;
  edges: ValidityEdge[];
  nodes: ValidityNode[];
  pending: DirtyPayload;
  revision: number;
}

export interface StatsPayload {
  revision: number;
  messages: number;
  freshTotal: number;
  lifetime: CounterPayload;
  lastRun: CounterPayload | null;
}

export interface MarginalsResponse {
  revision: number;
  root: string[];
  marginals: MarginalEntry[];
  variables: VariableEntry[];
}

export interface DocumentResponse {
  revision: number;
  document: NetworkDocument;
}

export interface NetworkDocument {
  variables: { name: string; frame: string[] }[];
  beliefs: { id: string; scope: string[]; focal: DocumentFocalEntry[] }[];
  tree?: { nodes: string[][]; edges: [number, number][] };
  root?: string[];
}

export interface ErrorPayload {
  error: string;
  detail: string;
  node?: string[] | null;
  phase?: string | null;
  rolledBack?: boolean;
  revision?: number;
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ErrorPayload,
  ) {
    super(payload.detail);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiRequestError(response.status, parsed as ErrorPayload);
    }
    return parsed as T;
  }

  createSession(document: NetworkDocument, root?: string[]): Promise<CreateResponse> {
    const body: Record<string, unknown> = { document };
    if (root) body.root = root;
    return this.request<CreateResponse>("POST", "/sessions", body);
  }

  dropSession(sessionId: string): Promise<{ dropped: string }> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }

  getDocument(sessionId: string): Promise<DocumentResponse> {
    return this.request("GET", `/sessions/${sessionId}/document`);
  }

  getTree(sessionId: string): Promise<{ revision: number; tree: TreePayload }> {
    return this.request("GET", `/sessions/${sessionId}/tree`);
  }

  getMarginals(sessionId: string): Promise<MarginalsResponse> {
    return this.request("GET", `/sessions/${sessionId}/marginals`);
  }

  getStats(sessionId: string): Promise<StatsPayload> {
    return this.request("GET", `/sessions/${sessionId}/stats`);
  }

  getValidity(sessionId: string): Promise<ValidityPayload> {
    return this.request("GET", `/sessions/${sessionId}/validity`);
  }

  updateBelief(
    sessionId: string,
    beliefId: string,
    focal: DocumentFocalEntry[],
    preview = false,
  ): Promise<UpdateResponse> {
    const body: Record<string, unknown> = { focal };
    if (preview) body.preview = true;
    return this.request("POST", `/sessions/${sessionId}/beliefs/${beliefId}`, body);
  }
}
