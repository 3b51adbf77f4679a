// Glue between the API client and the view model: FIFO sends, single-flight
// refresh, polling. The DOM layer subscribes and re-renders on every change.

import { ApiClient } from './api.js';
import {
  ViewModel,
  applyRefresh,
  applyRefreshFailure,
  applySeries,
  appendChat,
  appendChatFailure,
  emptyViewModel,
} from './state.js';

export const POLL_INTERVAL_MS = 2000;

export class Dashboard {
  vm: ViewModel = emptyViewModel();
  private sendQueue: Promise<unknown> = Promise.resolve();
  private refreshing = false;
  private listeners: Array<(vm: ViewModel) => void> = [];

  constructor(
    private readonly api: ApiClient,
    private readonly author: string = 'web',
    private readonly channel: string = 'dashboard',
  ) {}

  onChange(listener: (vm: ViewModel) => void): void {
    this.listeners.push(listener);
  }

  private update(vm: ViewModel): ViewModel {
    this.vm = vm;
    for (const listener of this.listeners) listener(vm);
    return vm;
  }

  /** Queue a chat line; resolves true when the server accepted it. */
  sendChat(text: string, at?: string): Promise<boolean> {
    const task = this.sendQueue.then(async () => {
      try {
        const replies = await this.api.sendMessage(this.channel, this.author, text, at);
        this.update(appendChat(this.vm, text, replies));
        return true;
      } catch (err) {
        this.update(appendChatFailure(this.vm, text, describe(err)));
        return false;
      }
    });
    this.sendQueue = task;
    return task;
  }

  /** Refetch actions and report; no-op while a refresh is already in flight. */
  async refreshBoard(): Promise<ViewModel> {
    if (this.refreshing) return this.vm;
    this.refreshing = true;
    try {
      const [actions, trends] = await Promise.all([this.api.actions(), this.api.report()]);
      return this.update(applyRefresh(this.vm, actions, trends));
    } catch {
      return this.update(applyRefreshFailure(this.vm));
    } finally {
      this.refreshing = false;
    }
  }

  async loadSeries(itemId: number): Promise<ViewModel> {
    const samples = await this.api.samples(itemId);
    return this.update(applySeries(this.vm, itemId, samples));
  }

  startPolling(intervalMs: number = POLL_INTERVAL_MS): () => void {
    const timer = setInterval(() => void this.refreshBoard(), intervalMs);
    return () => clearInterval(timer);
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
