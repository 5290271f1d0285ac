// Typed client for the engine's HTTP API. Only documented routes are used;
// every number rendered by the UI comes straight out of these responses.

import type { Dua, GuideResponse, Health, LocationInput, Place } from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }

  /** True for transient transport failures worth a retry button. */
  get retryable(): boolean {
    return this.status === 0 || this.status >= 500;
  }
}

let apiBase = '';

/** Point the client at another origin (tests, embedded dev servers). */
export function setApiBase(base: string): void {
  apiBase = base.replace(/\/$/, '');
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(apiBase + path, init);
  } catch {
    throw new ApiError(0, 'network_error', 'cannot reach the guide service');
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // fall through; non-JSON bodies are treated as opaque failures
  }
  if (!response.ok) {
    const record = (body ?? {}) as { code?: string; message?: string };
    throw new ApiError(
      response.status,
      record.code ?? 'error',
      record.message ?? `request failed with status ${response.status}`,
    );
  }
  return body as T;
}

export function getHealth(): Promise<Health> {
  return request('/api/health');
}

export function getPlaces(): Promise<Place[]> {
  return request('/api/places');
}

export function getDuas(): Promise<Dua[]> {
  return request('/api/duas');
}

export function getDua(id: string): Promise<GuideResponse> {
  return request(`/api/duas/${encodeURIComponent(id)}`);
}

export function resolveLocation(input: LocationInput): Promise<GuideResponse> {
  return request('/api/resolve/location', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(input),
  });
}

export function resolveImage(file: Blob, filename = 'photo'): Promise<GuideResponse> {
  const form = new FormData();
  form.append('image', file, filename);
  return request('/api/resolve/image', { method: 'POST', body: form });
}
