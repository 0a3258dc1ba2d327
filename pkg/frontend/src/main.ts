// DOM glue: binds the reducer/controller to the page. All view logic lives
// in render.ts; this file only wires events and swaps innerHTML.

import { ApiClient } from './api.js';
import { Controller } from './controller.js';
import type { Action, ViewState } from './state.js';
import { initialState, reduce } from './state.js';
import { renderCardsHtml, renderMapHtml, renderResultsHtml } from './render.js';
import type { Strategy } from './types.js';

declare global {
  interface Window {
    LW_API_BASE?: string;
  }
}

const api = new ApiClient(window.LW_API_BASE ?? '');

let state: ViewState = initialState();
const actionLog: Action[] = [];

function dispatch(action: Action): void {
  actionLog.push(action);
  state = reduce(state, action);
  render();
}

const controller = new Controller(api, dispatch, () => state);

const mapEl = document.getElementById('map')!;
const cardsEl = document.getElementById('cards')!;
const resultsEl = document.getElementById('results')!;
const statusEl = document.getElementById('status')!;
const queryForm = document.getElementById('query-form') as HTMLFormElement;
const queryText = document.getElementById('query-text') as HTMLInputElement;
const querySubmit = document.getElementById('query-submit') as HTMLButtonElement;
const strategySelect = document.getElementById('query-strategy') as HTMLSelectElement;
const themeButton = document.getElementById('theme-toggle')!;

function render(): void {
  document.body.dataset.theme = state.theme;
  mapEl.innerHTML = renderMapHtml(state);
  cardsEl.innerHTML = renderCardsHtml(state);
  resultsEl.innerHTML = renderResultsHtml(state);
  statusEl.textContent = state.map
    ? `cell (${state.avatar.i}, ${state.avatar.j}) of ${state.map.width}x${state.map.height}`
    : '';
  querySubmit.disabled = !queryText.value.trim();
}

const KEY_DELTAS: Record<string, [number, number]> = {
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
  ArrowUp: [0, 1], // j grows upward on the map
  ArrowDown: [0, -1],
};

window.addEventListener('keydown', (event) => {
  if (document.activeElement === queryText) return;
  const delta = KEY_DELTAS[event.key];
  if (!delta) return;
  event.preventDefault();
  void controller.move(delta[0], delta[1]);
});

mapEl.addEventListener('click', (event) => {
  const tile = (event.target as HTMLElement).closest<HTMLElement>('[data-cell]');
  if (!tile) return;
  const [i, j] = tile.dataset.cell!.split(',').map(Number);
  void controller.teleport({ i, j });
});

resultsEl.addEventListener('click', (event) => {
  const hit = (event.target as HTMLElement).closest<HTMLElement>('li[data-cell]');
  if (!hit) return;
  const [i, j] = hit.dataset.cell!.split(',').map(Number);
  void controller.teleport({ i, j });
});

cardsEl.addEventListener('click', (event) => {
  const button = (event.target as HTMLElement).closest<HTMLElement>('[data-action]');
  if (!button) return;
  if (button.dataset.action === 'show-all') dispatch({ type: 'toggle-show-all' });
  if (button.dataset.action === 'retry-cell') void controller.retryCell();
});

queryForm.addEventListener('submit', (event) => {
  event.preventDefault();
  void controller.runQuery(
    queryText.value,
    strategySelect.value as Strategy,
    Number((document.getElementById('query-k') as HTMLInputElement).value) || 10,
  );
});

queryText.addEventListener('input', () => {
  querySubmit.disabled = !queryText.value.trim();
});

themeButton.addEventListener('click', () => dispatch({ type: 'toggle-theme' }));

render();
void controller.loadMap();

// handy for debugging: replaying this log reproduces the current state
(window as unknown as { lwActionLog: Action[] }).lwActionLog = actionLog;
