// View model and its pure update functions. Kept free of DOM and network so
// the board logic is unit-testable.

import type { ActionJson, Reply, SampleJson, TrendJson } from './api.js';

export interface ChatEntry {
  kind: 'sent' | 'reply' | 'error';
  text: string;
}

export interface ViewModel {
  actions: ActionJson[];
  trends: Map<number, TrendJson>;
  seriesById: Map<number, SampleJson[]>;
  chatLog: ChatEntry[];
  stale: boolean;
}

export function emptyViewModel(): ViewModel {
  return { actions: [], trends: new Map(), seriesById: new Map(), chatLog: [], stale: false };
}

export function openActions(vm: ViewModel): ActionJson[] {
  return vm.actions.filter((a) => a.status === 'open');
}

export function archivedActions(vm: ViewModel): ActionJson[] {
  return vm.actions.filter((a) => a.status === 'closed');
}

/** Replace board data after a successful refresh; prunes series of vanished ids. */
export function applyRefresh(vm: ViewModel, actions: ActionJson[], trends: TrendJson[]): ViewModel {
  const ids = new Set(actions.map((a) => a.id));
  const seriesById = new Map<number, SampleJson[]>();
  for (const [id, samples] of vm.seriesById) {
    if (ids.has(id)) seriesById.set(id, samples);
  }
  return {
    ...vm,
    actions,
    trends: new Map(trends.map((t) => [t.item_id, t])),
    seriesById,
    stale: false,
  };
}

export function applyRefreshFailure(vm: ViewModel): ViewModel {
  return { ...vm, stale: true };
}

/** Attach a fetched series; ignored if the item is not on the board. */
export function applySeries(vm: ViewModel, itemId: number, samples: SampleJson[]): ViewModel {
  if (!vm.actions.some((a) => a.id === itemId)) return vm;
  const seriesById = new Map(vm.seriesById);
  seriesById.set(itemId, samples);
  return { ...vm, seriesById };
}

export function appendChat(vm: ViewModel, sent: string, replies: Reply[]): ViewModel {
  const entries: ChatEntry[] = [{ kind: 'sent', text: sent }];
  for (const reply of replies) entries.push({ kind: 'reply', text: reply.text });
  return { ...vm, chatLog: [...vm.chatLog, ...entries] };
}

export function appendChatFailure(vm: ViewModel, sent: string, message: string): ViewModel {
  return {
    ...vm,
    chatLog: [...vm.chatLog, { kind: 'sent', text: sent }, { kind: 'error', text: message }],
  };
}
