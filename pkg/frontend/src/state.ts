// Pure view state. Every change flows through reduce(), so a recorded
// action sequence replays to an identical state.

import type {
  CellRef,
  ClipSummary,
  MapDocument,
  QueryHit,
  Strategy,
} from './types.js';
import { cellKey, positiveKeys } from './types.js';

export type Theme = 'cartoon' | 'realistic';

export type QueryPanel = {
  status: 'idle' | 'pending' | 'done' | 'error';
  text: string;
  strategy: Strategy;
  error: string | null;
  results: QueryHit[];
  highlighted: CellRef[];
  fallbackUsed: boolean;
};

export type ViewState = {
  map: MapDocument | null;
  mapError: string | null;
  avatar: CellRef;
  gridToken: number;
  activeClips: ClipSummary[];
  cellPending: boolean;
  cellError: string | null;
  displayCap: number;
  showAll: boolean;
  query: QueryPanel;
  theme: Theme;
};

export type Action =
  | { type: 'map-loaded'; map: MapDocument }
  | { type: 'map-failed'; message: string }
  | { type: 'move'; di: number; dj: number }
  | { type: 'teleport'; cell: CellRef }
  | { type: 'cell-fetch-started'; token: number }
  | { type: 'cell-clips'; token: number; clips: ClipSummary[] }
  | { type: 'cell-fetch-failed'; token: number; message: string }
  | { type: 'toggle-show-all' }
  | { type: 'toggle-theme' }
  | { type: 'query-started'; text: string; strategy: Strategy }
  | { type: 'query-result'; text: string; strategy: Strategy; response: { results: QueryHit[]; fallback_used: boolean } }
  | { type: 'query-failed'; message: string };

export const DISPLAY_CAP = 4;

export function initialState(): ViewState {
  return {
    map: null,
    mapError: null,
    avatar: { i: 0, j: 0 },
    gridToken: 0,
    activeClips: [],
    cellPending: false,
    cellError: null,
    displayCap: DISPLAY_CAP,
    showAll: false,
    query: {
      status: 'idle',
      text: '',
      strategy: 'full',
      error: null,
      results: [],
      highlighted: [],
      fallbackUsed: false,
    },
    theme: 'cartoon',
  };
}

function clamp(value: number, low: number, high: number): number {
  return Math.min(Math.max(value, low), high);
}

function settle(state: ViewState, cell: CellRef): ViewState {
  // entering any cell clears the previous cell's cards immediately
  const moved = cell.i !== state.avatar.i || cell.j !== state.avatar.j;
  if (!moved) return state;
  return {
    ...state,
    avatar: cell,
    activeClips: [],
    cellPending: false,
    cellError: null,
    showAll: false,
  };
}

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.type) {
    case 'map-loaded': {
      const start = firstPositiveCell(action.map) ?? { i: 0, j: 0 };
      return { ...initialState(), theme: state.theme, map: action.map, avatar: start };
    }
    case 'map-failed':
      return { ...state, map: null, mapError: action.message };
    case 'move': {
      if (!state.map) return state;
      const target = {
        i: clamp(state.avatar.i + action.di, 0, state.map.width - 1),
        j: clamp(state.avatar.j + action.dj, 0, state.map.height - 1),
      };
      return settle(state, target);
    }
    case 'teleport': {
      if (!state.map) return state;
      const target = {
        i: clamp(action.cell.i, 0, state.map.width - 1),
        j: clamp(action.cell.j, 0, state.map.height - 1),
      };
      return settle(state, target);
    }
    case 'cell-fetch-started':
      return { ...state, gridToken: action.token, cellPending: true, cellError: null };
    case 'cell-clips':
      if (action.token !== state.gridToken) return state; // stale response
      return { ...state, activeClips: action.clips, cellPending: false };
    case 'cell-fetch-failed':
      if (action.token !== state.gridToken) return state;
      return { ...state, cellPending: false, cellError: action.message };
    case 'toggle-show-all':
      return { ...state, showAll: !state.showAll };
    case 'toggle-theme':
      return { ...state, theme: state.theme === 'cartoon' ? 'realistic' : 'cartoon' };
    case 'query-started':
      return {
        ...state,
        query: {
          status: 'pending',
          text: action.text,
          strategy: action.strategy,
          error: null,
          results: [],
          highlighted: [],
          fallbackUsed: false,
        },
      };
    case 'query-result': {
      const highlighted = action.response.results
        .map((hit) => hit.cell)
        .filter((cell): cell is CellRef => cell !== null)
        .filter((cell) => inBounds(state.map, cell));
      return {
        ...state,
        query: {
          status: 'done',
          text: action.text,
          strategy: action.strategy,
          error: null,
          results: action.response.results,
          highlighted,
          fallbackUsed: action.response.fallback_used,
        },
      };
    }
    case 'query-failed':
      return {
        ...state,
        query: { ...state.query, status: 'error', error: action.message, results: [], highlighted: [] },
      };
  }
}

export function replay(actions: Action[], start: ViewState = initialState()): ViewState {
  return actions.reduce(reduce, start);
}

export function isPositive(state: ViewState, cell: CellRef): boolean {
  if (!state.map) return false;
  return positiveKeys(state.map).has(cellKey(cell.i, cell.j));
}

function inBounds(map: MapDocument | null, cell: CellRef): boolean {
  return !!map && cell.i >= 0 && cell.i < map.width && cell.j >= 0 && cell.j < map.height;
}

function firstPositiveCell(map: MapDocument): CellRef | null {
  if (!map.positive_cells.length) return null;
  const sorted = [...map.positive_cells].sort((a, b) => a.i - b.i || a.j - b.j);
  return { i: sorted[0].i, j: sorted[0].j };
}
