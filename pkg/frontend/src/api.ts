/** Typed client over the platform's JSON API.
 *
 * The fetch function is injectable so tests can intercept exactly the
 * payloads the UI consumes. Review responses pass through a tally guard:
 * the review screens must never even receive label-distribution data.
 */

export interface Task {
  image_id: string;
  file_url: string;
  assigned_to: string;
  reason: string;
}

export interface QualificationBadge {
  state: string;               // NonQualified | Qualified | Disqualified
  windowed_agreement: number;
  scored_total: number;
}

export interface SubmitResponse {
  accepted: boolean;
  image_id: string;
  new_status: string;
  settled_label: string | null;
  qualification: QualificationBadge;
}

export interface ReviewItem {
  image_id: string;
  file_url: string;
  reason: string;              // tie | flagged | discrepancy
}

export interface AdjudicationResponse {
  image_id: string;
  status: string;
  label: string;
}

export interface IrrEntry { a: string; b: string; rho: number; n: number }
export interface IrrReportDto {
  methods: string[];
  experts: string[];
  rho: IrrEntry[];
  min_p: { expert: string; method: string; p: number }[];
}

export interface ConfusionDto {
  a: string;
  b: string;
  labels: string[];
  counts: number[][];
  column_percent: number[][];
  row_percent: number[][];
  total: number;
  exact_match_rate: number;
}

export interface CurvePoint {
  sample_size: number;
  mean_rho: number;
  sd_rho: number;
  ci_low: number;
  ci_high: number;
}

export class ApiError extends Error {
  constructor(readonly code: string, readonly status: number, detail: string) {
    super(detail);
  }
}

const REVIEW_FORBIDDEN_KEYS = new Set([
  "tally", "counts", "distribution", "total_qualified", "total_all",
  "agreement", "difficulty",
]);

/** Throws if a review payload carries tally/distribution data anywhere. */
export function assertTallyFree(payload: unknown, path = "$"): void {
  if (Array.isArray(payload)) {
    payload.forEach((item, i) => assertTallyFree(item, `${path}[${i}]`));
  } else if (payload !== null && typeof payload === "object") {
    for (const [key, value] of Object.entries(payload)) {
      if (REVIEW_FORBIDDEN_KEYS.has(key)) {
        throw new Error(`review payload leaks '${key}' at ${path}`);
      }
      assertTallyFree(value, `${path}.${key}`);
    }
  }
}

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly token: string | null = null,
    private readonly fetchFn: FetchFn = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await response.json();
    if (!response.ok) {
      const err = data as { error?: string; detail?: string };
      throw new ApiError(err.error ?? "http_error", response.status,
        err.detail ?? `HTTP ${response.status}`);
    }
    return data as T;
  }

  nextTask(): Promise<{ task: Task | null }> {
    return this.request("GET", "/tasks/next");
  }

  submitAnnotation(imageId: string, label: string): Promise<SubmitResponse> {
    return this.request("POST", "/annotations", { image_id: imageId, label });
  }

  fileFlag(imageId: string, kind: string, text: string): Promise<{ image_id: string; status: string }> {
    return this.request("POST", "/flags", { image_id: imageId, kind, text });
  }

  async reviewQueue(): Promise<ReviewItem[]> {
    const items = await this.request<ReviewItem[]>("GET", "/review/queue");
    assertTallyFree(items);
    return items;
  }

  async adjudicate(imageId: string, label: string): Promise<AdjudicationResponse> {
    const result = await this.request<AdjudicationResponse>(
      "POST", `/review/${encodeURIComponent(imageId)}/adjudicate`, { label });
    assertTallyFree(result);
    return result;
  }

  irrReport(methods?: string[]): Promise<IrrReportDto> {
    const query = methods ? `?methods=${encodeURIComponent(methods.join(","))}` : "";
    return this.request("GET", `/reports/irr${query}`);
  }

  confusion(a: string, b: string): Promise<ConfusionDto> {
    return this.request("GET",
      `/reports/confusion?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`);
  }

  crowdCurve(reference: string, sizes: number[], draws = 25):
      Promise<{ reference: string; points: CurvePoint[] }> {
    return this.request("GET",
      `/reports/crowd-curve?reference=${encodeURIComponent(reference)}`
      + `&sizes=${sizes.join(",")}&draws=${draws}`);
  }
}
