// Typed client for the bot's HTTP API. The dashboard never computes metrics
// or trends itself; everything shown comes back from these endpoints verbatim.

export interface MetricJson {
  kind: 'builtin' | 'cmd';
  name?: string;
  params?: Record<string, string>;
  command_line?: string;
}

export interface ActionJson {
  id: number;
  description: string;
  metric: MetricJson;
  cadence: string;
  created_at: string;
  created_by: string;
  status: 'open' | 'closed';
  closed_at: string | null;
}

export interface SampleJson {
  item_id: number;
  taken_at: string;
  value: number | null;
  error: string | null;
}

export interface TrendJson {
  item_id: number;
  baseline: SampleJson | null;
  latest: SampleJson | null;
  delta: number | null;
  direction: 'up' | 'down' | 'flat' | null;
  sample_count: number;
}

export interface Reply {
  channel: string;
  text: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { 'Content-Type': 'application/json' };
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const raw = await response.text();
    if (!response.ok) {
      let detail = raw;
      try {
        detail = (JSON.parse(raw) as { error?: string }).error ?? raw;
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(raw) as T;
  }

  async sendMessage(channel: string, author: string, text: string, at?: string): Promise<Reply[]> {
    const body: Record<string, string> = { channel, author, text };
    if (at !== undefined) body.at = at;
    const result = await this.request<{ replies: Reply[] }>('POST', '/api/messages', body);
    return result.replies;
  }

  actions(): Promise<ActionJson[]> {
    return this.request<ActionJson[]>('GET', '/api/actions');
  }

  samples(itemId: number): Promise<SampleJson[]> {
    return this.request<SampleJson[]>('GET', `/api/actions/${itemId}/samples`);
  }

  report(now?: string): Promise<TrendJson[]> {
    const query = now === undefined ? '' : `?now=${encodeURIComponent(now)}`;
    return this.request<TrendJson[]>('GET', `/api/report${query}`);
  }

  tick(now?: string): Promise<SampleJson[]> {
    return this.request<SampleJson[]>('POST', '/api/tick', now === undefined ? {} : { now });
  }
}
