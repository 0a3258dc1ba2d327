// Drives the controller against the fixture server (recorded payloads from
// the real service) and checks the acceptance behaviors end to end.

import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { Controller } from '../src/controller';
import { clipCards, mapTiles, queryResults } from '../src/render';
import type { Action, ViewState } from '../src/state';
import { initialState, reduce, replay } from '../src/state';
import { fixtureFetch, fixtureGrid, fixtureQuerySurprise } from './server';

function harness(fetchFn: typeof fetch = fixtureFetch as typeof fetch) {
  let state: ViewState = initialState();
  const log: Action[] = [];
  const dispatch = (action: Action) => {
    log.push(action);
    state = reduce(state, action);
  };
  const controller = new Controller(new ApiClient('', fetchFn), dispatch, () => state);
  return { controller, log, state: () => state };
}

describe('walking the map', () => {
  it('loads the map and lands on the first positive cell with its clips', async () => {
    const { controller, state } = harness();
    await controller.loadMap();
    expect(state().map).not.toBeNull();
    expect(state().avatar).toEqual({ i: 0, j: 0 });
    expect(clipCards(state()).map((c) => c.id)).toEqual(['c0', 'c1']);
  });

  it('stepping onto the known positive cell renders exactly its clips', async () => {
    const { controller, state } = harness();
    await controller.loadMap();
    await controller.teleport({ i: 3, j: 3 });
    const expected = fixtureGrid['3,3'].clips.map((c) => c.id);
    expect(clipCards(state()).map((c) => c.id)).toEqual(expected);
    expect(expected).toEqual(['c4']);
  });

  it('stepping onto a negative cell clears the cards', async () => {
    const { controller, state } = harness();
    await controller.loadMap();
    await controller.move(1, 0); // (1,0) holds nothing
    expect(state().avatar).toEqual({ i: 1, j: 0 });
    expect(clipCards(state())).toHaveLength(0);
  });

  it('stepping off the edge keeps both position and cards', async () => {
    const { controller, state } = harness();
    await controller.loadMap();
    const before = state();
    await controller.move(-1, 0);
    expect(state()).toEqual(before);
  });

  it('fetch failures keep the avatar and offer a retry', async () => {
    let fail = false;
    const flaky: typeof fetch = (input, init) => {
      if (fail && String(input).includes('/api/grid/')) {
        return Promise.reject(new Error('connection lost'));
      }
      return fixtureFetch(input, init);
    };
    const { controller, state } = harness(flaky);
    await controller.loadMap();
    fail = true;
    await controller.teleport({ i: 3, j: 3 });
    expect(state().avatar).toEqual({ i: 3, j: 3 });
    expect(state().cellError).toContain('connection lost');
    fail = false;
    await controller.retryCell();
    expect(clipCards(state()).map((c) => c.id)).toEqual(['c4']);
  });

  it('rapid movement never lets a stale response win', async () => {
    const gate: Array<() => void> = [];
    const slowFetch: typeof fetch = (input, init) => {
      const result = fixtureFetch(input, init);
      if (String(input).includes('/api/grid/')) {
        return new Promise((resolve) => {
          gate.push(() => resolve(result));
        });
      }
      return result;
    };
    const flush = () => new Promise<void>((resolve) => setTimeout(resolve, 0));
    const { controller, state } = harness(slowFetch);
    const load = controller.loadMap();
    await flush(); // let the initial grid fetch register
    gate.shift()!();
    await load;

    const first = controller.teleport({ i: 3, j: 3 });
    await flush();
    const second = controller.teleport({ i: 0, j: 0 });
    await flush();
    // resolve in arrival order: the (3,3) response is already stale
    gate.shift()!();
    gate.shift()!();
    await Promise.all([first, second]);
    expect(state().avatar).toEqual({ i: 0, j: 0 });
    expect(clipCards(state()).map((c) => c.id)).toEqual(['c0', 'c1']);
  });
});

describe('query panel', () => {
  it('surprise filter query renders only surprise-badged hits and highlights their cells', async () => {
    const { controller, state } = harness();
    await controller.loadMap();
    await controller.runQuery('A man is talking to the camera in surprise', 'filter', 3);
    const hits = queryResults(state());
    expect(hits.length).toBeGreaterThan(0);
    expect(hits.every((h) => h.emotion === 'surprise')).toBe(true);
    const highlighted = mapTiles(state()).filter((t) => t.highlighted);
    const expectedCells = fixtureQuerySurprise.results
      .map((r) => r.cell)
      .filter((c): c is { i: number; j: number } => c !== null);
    expect(highlighted.map((t) => ({ i: t.i, j: t.j }))).toEqual(expectedCells);
  });

  it('clicking a hit teleports to its cell', async () => {
    const { controller, state } = harness();
    await controller.loadMap();
    await controller.runQuery('A man is talking to the camera in surprise', 'filter', 3);
    const cell = state().query.results[0].cell!;
    await controller.teleport(cell);
    expect(state().avatar).toEqual(cell);
    expect(clipCards(state()).map((c) => c.id)).toEqual(['c4']);
  });

  it('empty text never issues a request', async () => {
    let queries = 0;
    const counting: typeof fetch = (input, init) => {
      if (String(input).includes('/api/query')) queries += 1;
      return fixtureFetch(input, init);
    };
    const { controller } = harness(counting);
    await controller.loadMap();
    await controller.runQuery('   ', 'full', 5);
    expect(queries).toBe(0);
  });

  it('API errors surface inline', async () => {
    const failing: typeof fetch = (input, init) => {
      if (String(input).includes('/api/query')) {
        return Promise.resolve(
          new Response(JSON.stringify({ code: 'empty_text', message: 'query text must be non-empty' }), {
            status: 400,
          }),
        );
      }
      return fixtureFetch(input, init);
    };
    const { controller, state } = harness(failing);
    await controller.loadMap();
    await controller.runQuery('x', 'full', 5);
    expect(state().query.status).toBe('error');
    expect(state().query.error).toContain('empty_text');
  });
});

describe('malformed and empty maps', () => {
  it('malformed documents produce an error state, not a crash', async () => {
    const broken: typeof fetch = () =>
      Promise.resolve(new Response(JSON.stringify({ nonsense: true }), { status: 200 }));
    const { controller, state } = harness(broken);
    await controller.loadMap();
    expect(state().map).toBeNull();
    expect(state().mapError).toContain('malformed');
  });

  it('a map with no positive cells is reported as an error', async () => {
    const empty: typeof fetch = () =>
      Promise.resolve(
        new Response(
          JSON.stringify({
            origin_x: 0,
            origin_y: 0,
            cell_size: 1,
            width: 2,
            height: 2,
            positive_cells: [],
          }),
          { status: 200 },
        ),
      );
    const { controller, state } = harness(empty);
    await controller.loadMap();
    expect(state().mapError).toContain('no positive cells');
  });
});

describe('replay determinism', () => {
  it('replaying the recorded action log reproduces the live state exactly', async () => {
    const { controller, log, state } = harness();
    await controller.loadMap();
    await controller.move(1, 0);
    await controller.move(0, 1); // (1,1) is positive
    await controller.runQuery('A man is talking to the camera in surprise', 'filter', 3);
    await controller.teleport({ i: 3, j: 3 });
    await controller.move(0, 1); // clamped at the top edge
    const live = state();
    expect(replay(log)).toEqual(live);
    expect(replay(log)).toEqual(replay(log));
  });
});
