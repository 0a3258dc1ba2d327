// View-model builders and HTML-string renderers. Pure functions of the
// state, so rendering is testable without a DOM.

import type { ViewState } from './state.js';
import type { ClipSummary, QueryHit } from './types.js';
import { cellKey, positiveKeys } from './types.js';

export type TileView = {
  i: number;
  j: number;
  positive: boolean;
  avatar: boolean;
  highlighted: boolean;
};

/** Tiles in render order: top row first (highest j), left to right. */
export function mapTiles(state: ViewState): TileView[] {
  if (!state.map) return [];
  const positives = positiveKeys(state.map);
  const highlighted = new Set(state.query.highlighted.map((c) => cellKey(c.i, c.j)));
  const tiles: TileView[] = [];
  for (let j = state.map.height - 1; j >= 0; j--) {
    for (let i = 0; i < state.map.width; i++) {
      const key = cellKey(i, j);
      tiles.push({
        i,
        j,
        positive: positives.has(key),
        avatar: state.avatar.i === i && state.avatar.j === j,
        highlighted: highlighted.has(key),
      });
    }
  }
  return tiles;
}

export type CardView = {
  id: string;
  caption: string;
  emotion: string;
  mediaUrl: string | null;
};

function toCard(clip: ClipSummary): CardView {
  return {
    id: clip.id,
    caption: clip.emotional_captions[0] ?? clip.naive_captions[0] ?? '(no caption)',
    emotion: clip.emotion ?? 'unknown',
    mediaUrl: clip.media_url,
  };
}

/** Cards for the avatar's cell, honoring the display cap. */
export function clipCards(state: ViewState): CardView[] {
  const cards = state.activeClips.map(toCard);
  return state.showAll ? cards : cards.slice(0, state.displayCap);
}

export function hiddenCardCount(state: ViewState): number {
  return state.showAll ? 0 : Math.max(0, state.activeClips.length - state.displayCap);
}

export type ResultView = CardView & { score: number; cellLabel: string | null };

export function queryResults(state: ViewState): ResultView[] {
  return state.query.results.map((hit: QueryHit) => ({
    ...toCard(hit.clip),
    score: hit.score,
    cellLabel: hit.cell ? cellKey(hit.cell.i, hit.cell.j) : null,
  }));
}

const escapeHtml = (value: string): string =>
  value
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');

export function renderMapHtml(state: ViewState): string {
  if (state.mapError) {
    return `<div class="banner error">map unavailable: ${escapeHtml(state.mapError)}</div>`;
  }
  if (!state.map) {
    return '<div class="banner">loading map…</div>';
  }
  const rows: string[] = [];
  const tiles = mapTiles(state);
  for (let offset = 0; offset < tiles.length; offset += state.map.width) {
    const cells = tiles
      .slice(offset, offset + state.map.width)
      .map((tile) => {
        const classes = ['tile', tile.positive ? 'positive' : 'negative'];
        if (tile.highlighted) classes.push('highlight');
        if (tile.avatar) classes.push('avatar');
        return `<div class="${classes.join(' ')}" data-cell="${tile.i},${tile.j}"></div>`;
      })
      .join('');
    rows.push(`<div class="map-row">${cells}</div>`);
  }
  return rows.join('');
}

export function renderCardsHtml(state: ViewState): string {
  if (state.cellError) {
    return `<div class="banner error">cell failed: ${escapeHtml(state.cellError)}
      <button data-action="retry-cell">retry</button></div>`;
  }
  if (state.cellPending) return '<div class="banner">fetching clips…</div>';
  const cards = clipCards(state);
  if (!cards.length) return '<div class="banner muted">nothing plays here</div>';
  const rendered = cards.map((card) => {
    const media = card.mediaUrl
      ? `<video src="${escapeHtml(card.mediaUrl)}" controls autoplay muted loop></video>`
      : '<div class="placeholder">no media</div>';
    return `<article class="card" data-clip="${escapeHtml(card.id)}">
      ${media}
      <span class="badge badge-${escapeHtml(card.emotion)}">${escapeHtml(card.emotion)}</span>
      <p>${escapeHtml(card.caption)}</p>
    </article>`;
  });
  const hidden = hiddenCardCount(state);
  if (hidden > 0) {
    rendered.push(
      `<button class="show-all" data-action="show-all">show all (${hidden} more)</button>`,
    );
  }
  return rendered.join('');
}

export function renderResultsHtml(state: ViewState): string {
  const { query } = state;
  if (query.status === 'idle') return '';
  if (query.status === 'pending') return '<div class="banner">searching…</div>';
  if (query.status === 'error') {
    return `<div class="banner error">${escapeHtml(query.error ?? 'query failed')}</div>`;
  }
  const notice = query.fallbackUsed
    ? '<div class="banner muted">no emotion phrase found; ran the full strategy</div>'
    : '';
  const items = queryResults(state)
    .map(
      (hit, rank) => `<li class="hit" data-clip="${escapeHtml(hit.id)}" ${
        hit.cellLabel ? `data-cell="${hit.cellLabel}"` : ''
      }>
        <span class="rank">${rank + 1}</span>
        <span class="badge badge-${escapeHtml(hit.emotion)}">${escapeHtml(hit.emotion)}</span>
        <span class="score">${hit.score.toFixed(3)}</span>
        <span class="caption">${escapeHtml(hit.caption)}</span>
      </li>`,
    )
    .join('');
  return `${notice}<ol class="hits">${items}</ol>`;
}
