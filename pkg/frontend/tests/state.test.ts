import { describe, expect, it } from 'vitest';

import type { ActionJson, TrendJson } from '../src/api.js';
import {
  appendChat,
  appendChatFailure,
  applyRefresh,
  applyRefreshFailure,
  applySeries,
  archivedActions,
  emptyViewModel,
  openActions,
} from '../src/state.js';

function action(id: number, status: 'open' | 'closed' = 'open'): ActionJson {
  return {
    id,
    description: `item ${id}`,
    metric: { kind: 'builtin', name: 'commit_count', params: {} },
    cadence: '1d',
    created_at: '2019-01-12T00:00:00Z',
    created_by: 'dana',
    status,
    closed_at: status === 'closed' ? '2019-01-13T00:00:00Z' : null,
  };
}

function trend(id: number): TrendJson {
  return { item_id: id, baseline: null, latest: null, delta: null, direction: null, sample_count: 0 };
}

describe('view model', () => {
  it('splits open items from the archive', () => {
    const vm = applyRefresh(emptyViewModel(), [action(1), action(2, 'closed')], []);
    expect(openActions(vm).map((a) => a.id)).toEqual([1]);
    expect(archivedActions(vm).map((a) => a.id)).toEqual([2]);
  });

  it('keeps series keys a subset of action ids', () => {
    let vm = applyRefresh(emptyViewModel(), [action(1), action(2)], []);
    vm = applySeries(vm, 2, []);
    expect([...vm.seriesById.keys()]).toEqual([2]);
    vm = applyRefresh(vm, [action(1)], []);
    expect([...vm.seriesById.keys()]).toEqual([]);
  });

  it('ignores series for unknown items', () => {
    const vm = applySeries(emptyViewModel(), 9, []);
    expect(vm.seriesById.size).toBe(0);
  });

  it('indexes trends by item id', () => {
    const vm = applyRefresh(emptyViewModel(), [action(1)], [trend(1)]);
    expect(vm.trends.get(1)?.sample_count).toBe(0);
  });

  it('appends sent text followed by every reply, in order', () => {
    const vm = appendChat(emptyViewModel(), '!retro list', [
      { channel: 'c', text: 'first' },
      { channel: 'c', text: 'second' },
    ]);
    expect(vm.chatLog.map((e) => e.kind)).toEqual(['sent', 'reply', 'reply']);
    expect(vm.chatLog[2].text).toBe('second');
  });

  it('records failures inline without losing the sent text', () => {
    const vm = appendChatFailure(emptyViewModel(), '!retro list', 'connection refused');
    expect(vm.chatLog.map((e) => e.kind)).toEqual(['sent', 'error']);
  });

  it('marks the board stale on refresh failure and clears it on success', () => {
    let vm = applyRefreshFailure(emptyViewModel());
    expect(vm.stale).toBe(true);
    vm = applyRefresh(vm, [], []);
    expect(vm.stale).toBe(false);
  });
});
