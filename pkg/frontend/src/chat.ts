// Chat panel: a log plus an input that speaks the same grammar as any chat
// channel the bot lives in. On network failure the typed text stays in the
// input so nothing is lost.

import { Dashboard } from './controller.js';
import type { ViewModel } from './state.js';

export function mountChat(root: HTMLElement, dashboard: Dashboard): void {
  root.innerHTML = `
    <div class="chat-log" data-role="log"></div>
    <form class="chat-form" data-role="form">
      <input type="text" data-role="input" placeholder='!retro help' autocomplete="off" />
      <button type="submit">Send</button>
    </form>
  `;
  const log = root.querySelector<HTMLElement>('[data-role=log]')!;
  const form = root.querySelector<HTMLFormElement>('[data-role=form]')!;
  const input = root.querySelector<HTMLInputElement>('[data-role=input]')!;

  dashboard.onChange((vm) => render(log, vm));

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = '';
    void dashboard.sendChat(text).then((accepted) => {
      if (!accepted && input.value === '') input.value = text;
      void dashboard.refreshBoard();
    });
  });
}

function render(log: HTMLElement, vm: ViewModel): void {
  log.replaceChildren(
    ...vm.chatLog.map((entry) => {
      const div = document.createElement('div');
      div.className = `chat-entry chat-${entry.kind}`;
      div.textContent = entry.kind === 'sent' ? `you: ${entry.text}` : entry.text;
      return div;
    }),
  );
  log.scrollTop = log.scrollHeight;
}
