// Typed client for the survey service JSON API.
// The payload shapes are frozen in fixtures/api-contract.json; the Python
// service tests validate against the same file.

export interface RatingLevel {
  level: number;
  label: string;
}

export interface SurveyItem {
  cui: string;
  term: string;
}

export interface SurveyPayload {
  iteration: number;
  levels: RatingLevel[];
  items: SurveyItem[];
  /** Present when requested with ?raterId=...: that rater's stored choices. */
  ratings?: Record<string, string>;
}

export interface IterationInfo {
  iteration: number;
  status: 'open' | 'frozen';
  weights: number[];
  raters: string[];
  ratingsCount: number;
  sampleSize: number;
}

export interface RatingRequest {
  iteration: number;
  raterId: string;
  cui: string;
  level: number | string;
}

export interface RatingResponse extends RatingRequest {
  bucket: string;
}

export interface HistogramData {
  counts: Record<string, number>;
  scoreRanges: Record<string, [number, number] | null>;
}

export interface ReportPayload {
  iteration: number;
  weights: number[];
  alphaAllRaters: number | null;
  alphaMetricVsRater: Record<string, number | null>;
  histograms: Record<string, HistogramData>;
  notes: string[];
}

export interface AdvanceRequest {
  strategy: string;
  budget: number;
  seed: number;
  raterId?: string;
  initPoints?: number;
}

export interface AdvanceResponse {
  iteration: number;
  weights: number[];
  bestValue: number;
  strategy: string;
  seed: number;
  evaluations: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // keep the status text
  }
  return new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(private baseUrl = '') {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      headers: { Accept: 'application/json' },
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json', Accept: 'application/json' },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  listIterations(): Promise<IterationInfo[]> {
    return this.getJson<IterationInfo[]>('/api/iterations');
  }

  getSurvey(iteration: number, raterId?: string): Promise<SurveyPayload> {
    const query = raterId ? `?raterId=${encodeURIComponent(raterId)}` : '';
    return this.getJson<SurveyPayload>(`/api/survey/${iteration}${query}`);
  }

  postRating(rating: RatingRequest): Promise<RatingResponse> {
    return this.postJson<RatingResponse>('/api/ratings', rating);
  }

  getReport(iteration: number): Promise<ReportPayload> {
    return this.getJson<ReportPayload>(`/api/report/${iteration}`);
  }

  postAdvance(request: AdvanceRequest): Promise<AdvanceResponse> {
    return this.postJson<AdvanceResponse>('/api/advance', request);
  }
}
