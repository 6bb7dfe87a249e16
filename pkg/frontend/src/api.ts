// Typed client for the game service JSON API. This is the only place the
// frontend talks to the network; round payloads deliberately have no year
// fields in their types.

export interface YearRound {
  round_id: string;
  image_url: string;
}

export interface YearReveal {
  correct: boolean;
  correct_year: number;
  title: string;
  static_points: number;
  dynamic_points: string;   // always two decimals, e.g. "4.88"
  feedback: string;
}

export interface TimelineRound {
  round_id: string;
  left_image_url: string;
  right_image_url: string;
}

export interface TimelineReveal {
  correct: boolean;
  left_year: number;
  right_year: number;
  static_points: number;
  dynamic_points: string;
  feedback: string;
}

export interface LeaderboardEntry {
  rank: number;
  username: string;
  total_static: number;
  total_dynamic: string;
}

export interface Leaderboard {
  kind: "static" | "dynamic";
  entries: LeaderboardEntry[];
}

export interface DecadeRow {
  decade: string;
  total_guesses: number;
  total_images_shown: number;
  correct_pct: string | null;
}

export interface PerformanceReport {
  decades: DecadeRow[];
  modes: { guess_year: string | null; timeline: string | null };
}

export interface SessionInfo {
  token: string;
  username: string | null;   // null for demo sessions
}

export type TimelineSide = "left" | "right";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    detail?: string,
  ) {
    super(detail ? `${code}: ${detail}` : code);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private token: string | null = null;
  private readonly fetchFn: FetchLike;

  constructor(private readonly baseUrl = "", fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  get sessionToken(): string | null {
    return this.token;
  }

  setToken(token: string | null): void {
    this.token = token;
  }

  imageUrl(path: string): string {
    return this.baseUrl + path;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "unknown_error";
      let detail: string | undefined;
      try {
        const payload = await response.json();
        code = payload.error ?? code;
        detail = payload.detail;
      } catch {
        // non-JSON error body; keep the generic code
      }
      throw new ApiError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }

  async register(
    username: string,
    password: string,
    ageBracket?: string,
  ): Promise<{ user_id: number; username: string }> {
    return this.request("POST", "/api/register", {
      username,
      password,
      age_bracket: ageBracket ?? null,
    });
  }

  async login(username: string, password: string): Promise<SessionInfo> {
    const data = await this.request<{ token: string; username: string }>(
      "POST", "/api/login", { username, password },
    );
    this.token = data.token;
    return { token: data.token, username: data.username };
  }

  async demo(): Promise<SessionInfo> {
    const data = await this.request<{ token: string }>("POST", "/api/demo");
    this.token = data.token;
    return { token: data.token, username: null };
  }

  newYearRound(): Promise<YearRound> {
    return this.request("GET", "/api/guess_the_year");
  }

  submitYearGuess(roundId: string, guess: number): Promise<YearReveal> {
    return this.request("POST", "/api/guess_the_year", { round_id: roundId, guess });
  }

  newTimelineRound(): Promise<TimelineRound> {
    return this.request("GET", "/api/timeline_challenge");
  }

  submitTimelineChoice(roundId: string, choice: TimelineSide): Promise<TimelineReveal> {
    return this.request("POST", "/api/timeline_challenge", {
      round_id: roundId,
      choice,
    });
  }

  leaderboard(kind: "static" | "dynamic", limit = 10): Promise<Leaderboard> {
    return this.request("GET", `/api/leaderboard?kind=${kind}&limit=${limit}`);
  }

  performance(): Promise<PerformanceReport> {
    return this.request("GET", "/api/performance");
  }
}
