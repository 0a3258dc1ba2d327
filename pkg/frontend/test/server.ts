// A fixture "server": a fetch implementation serving payloads recorded from
// the real Python service, so tests exercise the authentic wire contract.

import gridDoc from './fixtures/grid.json';
import mapDoc from './fixtures/map.json';
import querySurprise from './fixtures/query_filter_surprise.json';
import queryFull from './fixtures/query_full.json';

export const fixtureMap = mapDoc;
export const fixtureGrid = gridDoc as Record<string, { clips: Array<{ id: string }> }>;
export const fixtureQuerySurprise = querySurprise;
export const fixtureQueryFull = queryFull;

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export function fixtureFetch(
  input: RequestInfo | URL,
  init?: RequestInit,
): Promise<Response> {
  const url = String(input);
  if (url.endsWith('/api/map')) {
    return Promise.resolve(json(mapDoc));
  }
  const grid = url.match(/\/api\/grid\/(-?\d+)\/(-?\d+)$/);
  if (grid) {
    const key = `${grid[1]},${grid[2]}`;
    const payload = (gridDoc as Record<string, unknown>)[key];
    if (payload === undefined) {
      return Promise.resolve(json({ code: 'out_of_bounds', message: 'outside the grid' }, 404));
    }
    return Promise.resolve(json(payload));
  }
  if (url.endsWith('/api/query') && init?.method === 'POST') {
    const body = JSON.parse(String(init.body)) as { text: string; strategy: string };
    if (!body.text.trim()) {
      return Promise.resolve(json({ code: 'empty_text', message: 'query text must be non-empty' }, 400));
    }
    return Promise.resolve(json(body.strategy === 'filter' ? querySurprise : queryFull));
  }
  return Promise.resolve(json({ code: 'error', message: `no fixture for ${url}` }, 404));
}
