// Wire types for the latentwander HTTP API.

export type CellRef = { i: number; j: number };

export type PositiveCell = { i: number; j: number; clips: string[] };

export type MapDocument = {
  origin_x: number;
  origin_y: number;
  cell_size: number;
  width: number;
  height: number;
  positive_cells: PositiveCell[];
};

export type ClipSummary = {
  id: string;
  naive_captions: string[];
  emotional_captions: string[];
  emotion: string | null;
  media_url: string | null;
  x: number | null;
  y: number | null;
};

export type GridResponse = { clips: ClipSummary[] };

export type Strategy = 'filter' | 'full';

export type QueryHit = { clip: ClipSummary; score: number; cell: CellRef | null };

export type QueryResponse = {
  results: QueryHit[];
  comparisons: number;
  fallback_used: boolean;
};

export type ApiErrorBody = { code: string; message: string };

export function cellKey(i: number, j: number): string {
  return `${i},${j}`;
}

export function positiveKeys(map: MapDocument): Set<string> {
  return new Set(map.positive_cells.map((c) => cellKey(c.i, c.j)));
}
