// Typed client for the recommender service JSON API. The UI never computes
// scores or ordering itself; everything rendered comes verbatim from these
// payloads.

export type BookSummary = { id: string; title: string; rating: number | null };

export type SearchResponse = {
  items: BookSummary[];
  total: number;
  page: number;
  page_size: number;
};

export type RatingAck = { id: string; rating: number; rating_count: number };

export type TrainResponse = { generation: number; examples: number };

export type RankedEntry = { rank: number; id: string; title: string; score: number };

export type RankedResponse = { generation: number; entries: RankedEntry[] };

export type ExplanationRow = {
  slot: string;
  token: string;
  strength: number;
  count: number;
  influence: number;
};

export type ExplanationResponse = {
  generation: number;
  id: string;
  title: string;
  score: number;
  prior_log_odds: number;
  rows: ExplanationRow[];
};

export type FeatureRow = { id: string; title: string; rating: number; count: number };

export type FeatureResponse = {
  generation: number;
  slot: string;
  token: string;
  strength: number;
  rows: FeatureRow[];
};

export type StatusResponse = {
  generation: number;
  ratings: number;
  catalog_size: number;
  trained: boolean;
};

type ErrorBody = { error?: { code?: string; message?: string } };

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (input, init) => fetch(input, init);

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError("offline", `service unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      let body: ErrorBody = {};
      try {
        body = (await response.json()) as ErrorBody;
      } catch {
        // non-JSON error body; fall through to the generic message
      }
      throw new ApiError(
        body.error?.code ?? "bad_request",
        body.error?.message ?? `${path} -> HTTP ${response.status}`,
        response.status,
      );
    }
    return (await response.json()) as T;
  }

  status(): Promise<StatusResponse> {
    return this.request<StatusResponse>("/status");
  }

  search(query: string, page = 1, pageSize = 20): Promise<SearchResponse> {
    const params = new URLSearchParams({
      q: query,
      page: String(page),
      page_size: String(pageSize),
    });
    return this.request<SearchResponse>(`/books?${params}`);
  }

  rate(id: string, rating: number): Promise<RatingAck> {
    if (!Number.isInteger(rating) || rating < 1 || rating > 10) {
      // client-side bound: never submit anything but an integer 1..10
      return Promise.reject(
        new ApiError("invalid_rating", `rating must be an integer 1..10, got ${rating}`, 0),
      );
    }
    return this.request<RatingAck>("/ratings", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ id, rating }),
    });
  }

  ratings(): Promise<{ items: (BookSummary & { rating: number })[]; count: number }> {
    return this.request("/ratings");
  }

  train(): Promise<TrainResponse> {
    return this.request<TrainResponse>("/train", { method: "POST" });
  }

  recommendations(n = 10): Promise<RankedResponse> {
    return this.request<RankedResponse>(`/recommendations?n=${n}`);
  }

  bottom(n = 10): Promise<RankedResponse> {
    return this.request<RankedResponse>(`/bottom?n=${n}`);
  }

  explain(id: string, k = 20): Promise<ExplanationResponse> {
    return this.request<ExplanationResponse>(`/explain/${encodeURIComponent(id)}?k=${k}`);
  }

  explainFeature(slot: string, token: string, k = 5): Promise<FeatureResponse> {
    const path = `/explain-feature/${encodeURIComponent(slot)}/${encodeURIComponent(token)}?k=${k}`;
    return this.request<FeatureResponse>(path);
  }
}
