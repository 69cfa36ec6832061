import { api } from './api.js';
import { ReviewController, type View } from './controller.js';
import type { QueueItem, Stats } from './types.js';

const STATS_POLL_MS = 10_000;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function must(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

class DomView implements View {
  private queueHost = must('queue');
  private statsHost = must('stats');
  private banner = must('offline-banner');
  private versionBadge = must('model-version');
  private toastHost = must('toasts');
  private retrainButton = must('retrain') as HTMLButtonElement;
  private onVerdict: (id: string, verdict: 'Negative' | 'Other') => void = () => {};

  bindVerdict(handler: (id: string, verdict: 'Negative' | 'Other') => void): void {
    this.onVerdict = handler;
  }

  renderQueue(items: QueueItem[], inFlight: ReadonlySet<string>): void {
    this.queueHost.replaceChildren();
    if (items.length === 0) {
      this.queueHost.append(el('p', 'empty', 'Queue is empty.'));
      return;
    }
    for (const item of items) {
      const row = el('article', 'item');
      const head = el('header');
      head.append(
        el('span', 'score', item.negative_score.toFixed(3)),
        el('span', 'label', item.predicted_label),
        el('span', 'id', item.tweet_id),
      );
      const buttons = el('div', 'actions');
      const confirm = el('button', 'confirm', 'Confirm negative');
      const reject = el('button', 'reject', 'Reject');
      const busy = inFlight.has(item.tweet_id);
      confirm.disabled = busy;
      reject.disabled = busy;
      confirm.addEventListener('click', () => {
        confirm.disabled = reject.disabled = true;
        this.onVerdict(item.tweet_id, 'Negative');
      });
      reject.addEventListener('click', () => {
        confirm.disabled = reject.disabled = true;
        this.onVerdict(item.tweet_id, 'Other');
      });
      buttons.append(confirm, reject);
      row.append(head, el('p', 'text', item.text), buttons);
      this.queueHost.append(row);
    }
  }

  renderStats(stats: Stats | null): void {
    this.statsHost.replaceChildren();
    if (!stats) return;
    const counters = el('div', 'counters');
    for (const [name, value] of [
      ['pending', stats.pending],
      ['confirmed', stats.confirmed],
      ['rejected', stats.rejected],
    ] as const) {
      const box = el('div', 'counter');
      box.append(el('strong', undefined, String(value)), el('span', undefined, name));
      counters.append(box);
    }
    this.statsHost.append(counters);
    const gauge = el('div', 'gauge');
    if (stats.flag_precision_estimate === undefined) {
      gauge.textContent = 'flag precision: no verdicts yet';
    } else {
      const pct = (stats.flag_precision_estimate * 100).toFixed(1);
      gauge.textContent = `flag precision: ${pct}%`;
      const bar = el('div', 'bar');
      bar.style.width = `${Math.round(stats.flag_precision_estimate * 100)}%`;
      const track = el('div', 'track');
      track.append(bar);
      gauge.append(track);
    }
    this.statsHost.append(gauge);
  }

  setOffline(offline: boolean): void {
    this.banner.hidden = !offline;
    this.retrainButton.disabled = offline;
    this.queueHost
      .querySelectorAll('button')
      .forEach((button) => (button.disabled = offline));
  }

  setRetrainEnabled(enabled: boolean): void {
    this.retrainButton.disabled = !enabled;
    this.retrainButton.textContent = enabled ? 'Retrain model' : 'Retraining…';
  }

  showModelVersion(version: number): void {
    this.versionBadge.textContent = `model v${version}`;
  }

  showToast(message: string, kind: 'info' | 'error'): void {
    const toast = el('div', `toast ${kind}`, message);
    this.toastHost.append(toast);
    setTimeout(() => toast.remove(), 4000);
  }
}

function start(): void {
  const view = new DomView();
  const controller = new ReviewController(api, view);
  view.bindVerdict((id, verdict) => void controller.verdict(id, verdict));
  must('retrain').addEventListener('click', () => void controller.retrain());
  must('refresh').addEventListener('click', () => void controller.refreshQueue());

  void controller.refreshQueue();
  void controller.refreshStats();
  setInterval(() => void controller.refreshStats(), STATS_POLL_MS);
}

document.addEventListener('DOMContentLoaded', start);
