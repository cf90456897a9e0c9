/** Typed client for the path-controller HTTP/JSON API.
 *
 * Every method maps 1:1 to a documented endpoint; the UI performs no
 * routing computation of its own.
 */

export interface NodeInfo {
  id: number;
  router_id: string;
}

export interface LinkInfo {
  id: string;
  from: number;
  to: number;
  igp: number;
  te: number;
  delay_us: number;
  colors: string[];
}

export interface TopologyInfo {
  nodes: NodeInfo[];
  links: LinkInfo[];
  affinity: Record<string, number>;
}

export interface FadConstraint {
  op: string;
  colors: string[];
}

export interface FadInfo {
  algo: number;
  metric: string;
  calc: number;
  constraints: FadConstraint[];
  participants: number[];
}

export interface VrfAttachment {
  node: number;
  prefix: string;
}

export interface VrfInfo {
  name: string;
  rd: string;
  color: number;
  vpn_label: number;
  bound_algo: number | null;
  attachments: VrfAttachment[];
}

export interface FadSubmission {
  metric: string;
  op: string;
  colors: string[];
  target_color: number;
}

export interface FadOutcome {
  kind: "REUSED" | "CREATED";
  algo: number;
  bound_color: number;
}

export interface NextHop {
  adjacency: string;
  neighbor: number;
}

export interface PathDestination {
  dest: number;
  router_id: string;
  distance: number;
  next_hops: NextHop[];
}

export interface PathsInfo {
  algo: number;
  source: number;
  destinations: PathDestination[];
}

export interface TracerouteHop {
  node: number;
  labels: number[];
}

export interface DelayReport {
  changed_algos: number[];
  path_diffs: Record<string, { old: number[]; new: number[] }>;
}

export interface ApiErrorDetail {
  code: string;
  message: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchFn = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`, init);
    const body = await resp.json();
    if (!resp.ok) {
      const detail = (body?.detail ?? {}) as Partial<ApiErrorDetail>;
      throw new ApiError(
        resp.status,
        detail.code ?? "HttpError",
        detail.message ?? `HTTP ${resp.status} on ${path}`,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  topology(): Promise<TopologyInfo> {
    return this.request("/topology");
  }

  fads(): Promise<FadInfo[]> {
    return this.request("/fads");
  }

  vrfs(): Promise<VrfInfo[]> {
    return this.request("/vrfs");
  }

  paths(algo: number, source: number): Promise<PathsInfo> {
    return this.request(`/paths/${algo}?source=${source}`);
  }

  submitFad(submission: FadSubmission): Promise<FadOutcome> {
    return this.post("/fads", submission);
  }

  setDelay(linkId: string, delayUs: number): Promise<DelayReport> {
    return this.post(`/links/${linkId}/delay`, { delay_us: delayUs });
  }

  traceroute(
    ingress: number,
    vrf: string,
    dstIp: string,
  ): Promise<{ hops: TracerouteHop[] }> {
    return this.post("/traceroute", { ingress, vrf, dst_ip: dstIp });
  }
}
