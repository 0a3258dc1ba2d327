// Orchestrates API calls around the pure reducer. Every state change is a
// dispatched action, so the dispatch log alone reproduces the ViewState.

import { ApiClient, ApiError } from './api.js';
import type { Action, ViewState } from './state.js';
import { isPositive } from './state.js';
import type { CellRef, Strategy } from './types.js';

export class Controller {
  private cellToken = 0;
  private inflight: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly dispatch: (action: Action) => void,
    private readonly getState: () => ViewState,
  ) {}

  async loadMap(): Promise<void> {
    try {
      const map = await this.api.map();
      if (!map.positive_cells.length) {
        this.dispatch({ type: 'map-failed', message: 'map has no positive cells' });
        return;
      }
      this.dispatch({ type: 'map-loaded', map });
      await this.enterCell();
    } catch (error) {
      this.dispatch({ type: 'map-failed', message: describe(error) });
    }
  }

  async move(di: number, dj: number): Promise<void> {
    const before = this.getState().avatar;
    this.dispatch({ type: 'move', di, dj });
    await this.afterStep(before);
  }

  async teleport(cell: CellRef): Promise<void> {
    const before = this.getState().avatar;
    this.dispatch({ type: 'teleport', cell });
    await this.afterStep(before);
  }

  async retryCell(): Promise<void> {
    await this.enterCell();
  }

  private async afterStep(before: CellRef): Promise<void> {
    const after = this.getState().avatar;
    if (after.i === before.i && after.j === before.j) return; // clamped at an edge
    await this.enterCell();
  }

  /** Fetch the avatar cell's clips when positive; rapid movement cancels
   * the previous fetch and stale responses are dropped by token. */
  private async enterCell(): Promise<void> {
    const state = this.getState();
    const cell = state.avatar;
    this.inflight?.abort();
    if (!state.map || !isPositive(state, cell)) return;
    const token = ++this.cellToken;
    const abort = new AbortController();
    this.inflight = abort;
    this.dispatch({ type: 'cell-fetch-started', token });
    try {
      const response = await this.api.grid(cell.i, cell.j, abort.signal);
      this.dispatch({ type: 'cell-clips', token, clips: response.clips });
    } catch (error) {
      if (abort.signal.aborted) return; // superseded by a newer step
      this.dispatch({ type: 'cell-fetch-failed', token, message: describe(error) });
    }
  }

  async runQuery(text: string, strategy: Strategy, k: number): Promise<void> {
    if (!text.trim()) return; // submit stays disabled on empty text
    this.dispatch({ type: 'query-started', text, strategy });
    try {
      const response = await this.api.query(text, strategy, k);
      this.dispatch({ type: 'query-result', text, strategy, response });
    } catch (error) {
      this.dispatch({ type: 'query-failed', message: describe(error) });
    }
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.message} [${error.code}]`;
  return error instanceof Error ? error.message : String(error);
}
