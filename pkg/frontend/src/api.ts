/** Typed client for the annotation HTTP API. */

export type Label = "real" | "commemoration" | "fake";

export const LABELS: readonly Label[] = ["real", "commemoration", "fake"];

export interface Candidate {
  person_id: string;
  name: string;
  description: string;
  birth: string;
  death: string | null;
  death_display: string;
}

export interface TweetRecord {
  id: string;
  timestamp: number;
  text: string;
  user_id: string;
  [extra: string]: unknown;
}

export interface ReportSummary {
  report_id: string;
  candidates: Candidate[];
  first_day: string;
  day_span: [string, string];
  tweet_count: number;
  suggested_label: Label | null;
  status: "pending" | "annotated";
  label: Label | null;
  resolved_person_id: string | null;
}

export interface ReportView extends ReportSummary {
  tweets: TweetRecord[];
  tweet_page: number;
  tweet_page_count: number;
}

export interface Counts {
  total: number;
  annotated: number;
  pending: number;
}

export interface ReportList extends Counts {
  reports: ReportSummary[];
  page: number;
  page_count: number;
}

export interface SubmitResult extends Counts {
  ok: boolean;
  report_id?: string;
  skipped?: boolean;
}

export interface Selection {
  resolved_person_id: string;
  label: Label;
  annotator: string;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (input, init) =>
      globalThis.fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError(`network error: ${String(err)}`, 0);
    }
    if (!response.ok) {
      let detail = `request failed with status ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // Non-JSON error body; keep the status message.
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  listReports(status = "all", page = 1): Promise<ReportList> {
    return this.request<ReportList>(
      `/api/reports?status=${encodeURIComponent(status)}&page=${page}`,
    );
  }

  getReport(reportId: string, tweetPage = 1): Promise<ReportView> {
    return this.request<ReportView>(
      `/api/reports/${encodeURIComponent(reportId)}?tweet_page=${tweetPage}`,
    );
  }

  submit(reportId: string, selection: Selection): Promise<SubmitResult> {
    return this.request<SubmitResult>(
      `/api/reports/${encodeURIComponent(reportId)}/annotation`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ report_id: reportId, ...selection }),
      },
    );
  }

  skip(reportId: string, annotator: string): Promise<SubmitResult> {
    return this.request<SubmitResult>(
      `/api/reports/${encodeURIComponent(reportId)}/annotation`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ report_id: reportId, skip: true, annotator }),
      },
    );
  }

  exportUrl(): string {
    return `${this.base}/api/export`;
  }
}
