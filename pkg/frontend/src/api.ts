import type { GridResponse, MapDocument, QueryResponse, Strategy } from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asError(response: Response): Promise<ApiError> {
  let code = 'error';
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.code === 'string') {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, code, message);
}

export function validateMapDocument(doc: unknown): MapDocument {
  const candidate = doc as MapDocument | null;
  if (
    !candidate ||
    typeof candidate.width !== 'number' ||
    typeof candidate.height !== 'number' ||
    candidate.width < 1 ||
    candidate.height < 1 ||
    typeof candidate.cell_size !== 'number' ||
    !Array.isArray(candidate.positive_cells)
  ) {
    throw new ApiError(0, 'malformed_map', 'malformed map document');
  }
  return candidate;
}

/** Thin typed client over the read-only service endpoints. */
export class ApiClient {
  constructor(
    private readonly base = '',
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, { signal });
    if (!response.ok) throw await asError(response);
    return (await response.json()) as T;
  }

  async map(): Promise<MapDocument> {
    const doc = await this.get<unknown>('/api/map');
    return validateMapDocument(doc);
  }

  grid(i: number, j: number, signal?: AbortSignal): Promise<GridResponse> {
    return this.get<GridResponse>(`/api/grid/${i}/${j}`, signal);
  }

  async query(text: string, strategy: Strategy, k: number): Promise<QueryResponse> {
    const response = await this.fetchFn(`${this.base}/api/query`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text, strategy, k }),
    });
    if (!response.ok) throw await asError(response);
    return (await response.json()) as QueryResponse;
  }
}
