// View state: one active mode, at most one in-flight request per mode.
// Later submissions supersede earlier ones via monotonically increasing
// request ids; stale completions are dropped.

import type { ApiError } from './api.js';

export type Mode = 'list' | 'location' | 'image';

export interface ModeState<T> {
  pending: boolean;
  lastRequestId: number;
  result: T | null;
  error: ApiError | null;
}

export interface AppState<T> {
  mode: Mode;
  modes: Record<Mode, ModeState<T>>;
}

export function initialState<T>(): AppState<T> {
  const empty = (): ModeState<T> => ({
    pending: false,
    lastRequestId: 0,
    result: null,
    error: null,
  });
  return { mode: 'list', modes: { list: empty(), location: empty(), image: empty() } };
}

export function switchMode<T>(state: AppState<T>, mode: Mode): AppState<T> {
  return { ...state, mode };
}

/** Mark a new request in flight; returns the id the completion must carry. */
export function beginRequest<T>(
  state: AppState<T>,
  mode: Mode,
): { state: AppState<T>; requestId: number } {
  const current = state.modes[mode];
  const requestId = current.lastRequestId + 1;
  const next: ModeState<T> = { ...current, pending: true, lastRequestId: requestId };
  return { state: { ...state, modes: { ...state.modes, [mode]: next } }, requestId };
}

function settle<T>(
  state: AppState<T>,
  mode: Mode,
  requestId: number,
  patch: Partial<ModeState<T>>,
): AppState<T> {
  const current = state.modes[mode];
  if (requestId !== current.lastRequestId) {
    return state; // a newer submission superseded this one
  }
  const next: ModeState<T> = { ...current, pending: false, ...patch };
  return { ...state, modes: { ...state.modes, [mode]: next } };
}

export function completeRequest<T>(
  state: AppState<T>,
  mode: Mode,
  requestId: number,
  result: T,
): AppState<T> {
  return settle(state, mode, requestId, { result, error: null });
}

export function failRequest<T>(
  state: AppState<T>,
  mode: Mode,
  requestId: number,
  error: ApiError,
): AppState<T> {
  return settle(state, mode, requestId, { error, result: null });
}
