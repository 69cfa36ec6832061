import { ApiError, type ReviewApi } from './api.js';
import type { QueueItem, Stats, Verdict } from './types.js';

/** Rendering surface; the DOM layer and the tests both implement this. */
export interface View {
  renderQueue(items: QueueItem[], inFlight: ReadonlySet<string>): void;
  renderStats(stats: Stats | null): void;
  setOffline(offline: boolean): void;
  setRetrainEnabled(enabled: boolean): void;
  showModelVersion(version: number): void;
  showToast(message: string, kind: 'info' | 'error'): void;
}

/**
 * Queue and stats orchestration.
 *
 * Verdicts are optimistic: the row disappears immediately and comes back
 * (with a toast) if the POST fails with anything other than 409.  A 409
 * means someone already judged the item, so it stays removed.  Every
 * displayed number round-trips from the API; nothing is fabricated.
 */
export class ReviewController {
  private items: QueueItem[] = [];
  private inFlight = new Set<string>();
  private retrainRunning = false;

  constructor(
    private readonly api: ReviewApi,
    private readonly view: View,
  ) {}

  get queue(): readonly QueueItem[] {
    return this.items;
  }

  async refreshQueue(): Promise<void> {
    try {
      // Server order is authoritative (score descending, then id).
      this.items = await this.api.fetchQueue();
      this.view.setOffline(false);
    } catch (error) {
      this.markOfflineOr(error);
      return;
    }
    this.view.renderQueue(this.items, this.inFlight);
  }

  async refreshStats(): Promise<void> {
    try {
      const stats = await this.api.fetchStats();
      this.view.setOffline(false);
      this.view.renderStats(stats);
    } catch (error) {
      this.markOfflineOr(error);
    }
  }

  /** Returns false when the click was ignored (already in flight). */
  async verdict(tweetId: string, verdict: Verdict): Promise<boolean> {
    if (this.inFlight.has(tweetId)) return false;
    const snapshot = this.items;
    this.inFlight.add(tweetId);
    this.items = this.items.filter((item) => item.tweet_id !== tweetId);
    this.view.renderQueue(this.items, this.inFlight);
    try {
      await this.api.submitVerdict(tweetId, verdict);
      await this.refreshStats();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.view.showToast(`${tweetId}: already judged elsewhere`, 'info');
        await this.refreshStats();
      } else {
        // Roll the row back; the server never saw the verdict.
        this.items = snapshot;
        this.view.showToast(this.describe(error), 'error');
      }
    } finally {
      this.inFlight.delete(tweetId);
      this.view.renderQueue(this.items, this.inFlight);
    }
    return true;
  }

  async retrain(): Promise<void> {
    if (this.retrainRunning) return;
    this.retrainRunning = true;
    this.view.setRetrainEnabled(false);
    try {
      const result = await this.api.retrain();
      this.view.showModelVersion(result.model_version);
      this.view.showToast(
        `retrained: version ${result.model_version}, ${result.train_size} instances`,
        'info',
      );
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.view.showToast('retrain already running', 'info');
      } else {
        this.view.showToast(this.describe(error), 'error');
      }
    } finally {
      this.retrainRunning = false;
      this.view.setRetrainEnabled(true);
    }
  }

  private markOfflineOr(error: unknown): void {
    if (error instanceof ApiError) {
      this.view.showToast(this.describe(error), 'error');
    } else {
      this.view.setOffline(true);
    }
  }

  private describe(error: unknown): string {
    if (error instanceof ApiError) return `${error.status}: ${error.message}`;
    return error instanceof Error ? error.message : String(error);
  }
}
