// Action-item board: open items with trend badges, an archive for closed
// ones, and a detail pane with the series chart for the selected item.

import { Dashboard } from './controller.js';
import { renderTrendSvg, trendBadge } from './chart.js';
import { archivedActions, openActions, ViewModel } from './state.js';
import type { ActionJson } from './api.js';

export function mountBoard(root: HTMLElement, dashboard: Dashboard): void {
  root.innerHTML = `
    <div class="board-header">
      <h2>Action items</h2>
      <span class="stale-badge" data-role="stale" hidden>stale data</span>
    </div>
    <ul class="board-list" data-role="open"></ul>
    <div class="trend-pane" data-role="trend" hidden></div>
    <h3>Archive</h3>
    <ul class="board-list archive" data-role="archive"></ul>
  `;
  const openList = root.querySelector<HTMLElement>('[data-role=open]')!;
  const archiveList = root.querySelector<HTMLElement>('[data-role=archive]')!;
  const staleBadge = root.querySelector<HTMLElement>('[data-role=stale]')!;
  const trendPane = root.querySelector<HTMLElement>('[data-role=trend]')!;
  let selected: number | null = null;

  dashboard.onChange((vm) => {
    staleBadge.hidden = !vm.stale;
    renderList(openList, openActions(vm), vm, true);
    renderList(archiveList, archivedActions(vm), vm, false);
    renderTrendPane(trendPane, vm, selected);
  });

  root.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>('[data-item-id]');
    if (!target) return;
    selected = Number(target.dataset.itemId);
    void dashboard.loadSeries(selected).then(() => {
      renderTrendPane(trendPane, dashboard.vm, selected);
    });
  });

  function renderList(list: HTMLElement, items: ActionJson[], vm: ViewModel, open: boolean): void {
    if (items.length === 0) {
      const li = document.createElement('li');
      li.className = 'empty';
      li.textContent = open ? 'No open action items.' : 'Nothing archived.';
      list.replaceChildren(li);
      return;
    }
    list.replaceChildren(
      ...items.map((item) => {
        const li = document.createElement('li');
        li.dataset.itemId = String(item.id);
        const badge = open ? trendBadge(vm.trends.get(item.id)) : `closed ${item.closed_at ?? ''}`;
        li.innerHTML = `<span class="item-id">#${item.id}</span> ` +
          `<span class="item-desc"></span> <span class="badge"></span>`;
        li.querySelector('.item-desc')!.textContent = item.description;
        li.querySelector('.badge')!.textContent = badge;
        return li;
      }),
    );
  }

  function renderTrendPane(pane: HTMLElement, vm: ViewModel, itemId: number | null): void {
    if (itemId === null || !vm.actions.some((a) => a.id === itemId)) {
      pane.hidden = true;
      return;
    }
    pane.hidden = false;
    const samples = vm.seriesById.get(itemId) ?? [];
    pane.innerHTML = `<h3>#${itemId} series</h3>` + renderTrendSvg(samples, vm.trends.get(itemId));
  }
}
