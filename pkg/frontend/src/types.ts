export interface QueueItem {
  tweet_id: string;
  text: string;
  negative_score: number;
  predicted_label: string;
  status: string;
}

export type Verdict = 'Negative' | 'Other';

export interface Stats {
  pending: number;
  confirmed: number;
  rejected: number;
  flag_precision_estimate?: number;
}

export interface RetrainResult {
  model_version: number;
  train_size: number;
}

export interface PredictResult {
  label: string;
  negative_score: number;
  scores: Record<string, number>;
}
