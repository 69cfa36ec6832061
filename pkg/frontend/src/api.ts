import type { PredictResult, QueueItem, RetrainResult, Stats, Verdict } from './types.js';

/** Error carrying the HTTP status, so callers can branch on 409 etc. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export interface ReviewApi {
  fetchQueue(limit?: number): Promise<QueueItem[]>;
  submitVerdict(tweetId: string, verdict: Verdict): Promise<QueueItem>;
  fetchStats(): Promise<Stats>;
  retrain(): Promise<RetrainResult>;
  predict(text: string): Promise<PredictResult>;
}

export const api: ReviewApi = {
  fetchQueue(limit?: number): Promise<QueueItem[]> {
    const query = limit === undefined ? '' : `?limit=${limit}`;
    return request<QueueItem[]>(`/api/review/queue${query}`);
  },

  submitVerdict(tweetId: string, verdict: Verdict): Promise<QueueItem> {
    return request<QueueItem>(`/api/review/${encodeURIComponent(tweetId)}`, {
      method: 'POST',
      body: JSON.stringify({ verdict }),
    });
  },

  fetchStats(): Promise<Stats> {
    return request<Stats>('/api/stats');
  },

  retrain(): Promise<RetrainResult> {
    return request<RetrainResult>('/api/retrain', { method: 'POST' });
  },

  predict(text: string): Promise<PredictResult> {
    return request<PredictResult>('/api/predict', {
      method: 'POST',
      body: JSON.stringify({ text }),
    });
  },
};
