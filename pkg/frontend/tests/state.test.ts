import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api.js';
import {
  beginRequest,
  completeRequest,
  failRequest,
  initialState,
  switchMode,
} from '../src/state.js';

describe('view state', () => {
  it('starts on the list mode with nothing in flight', () => {
    const state = initialState<string>();
    expect(state.mode).toBe('list');
    for (const mode of ['list', 'location', 'image'] as const) {
      expect(state.modes[mode].pending).toBe(false);
      expect(state.modes[mode].result).toBeNull();
      expect(state.modes[mode].error).toBeNull();
    }
  });

  it('switches the active mode without touching per-mode state', () => {
    let state = initialState<string>();
    const { state: busy } = beginRequest(state, 'image');
    state = switchMode(busy, 'image');
    expect(state.mode).toBe('image');
    expect(state.modes.image.pending).toBe(true);
    expect(state.modes.list.pending).toBe(false);
  });

  it('completes the matching request', () => {
    let state = initialState<string>();
    const begun = beginRequest(state, 'location');
    state = completeRequest(begun.state, 'location', begun.requestId, 'answer');
    expect(state.modes.location.pending).toBe(false);
    expect(state.modes.location.result).toBe('answer');
    expect(state.modes.location.error).toBeNull();
  });

  it('stores failures and clears stale results', () => {
    let state = initialState<string>();
    let begun = beginRequest(state, 'location');
    state = completeRequest(begun.state, 'location', begun.requestId, 'first');
    begun = beginRequest(state, 'location');
    const error = new ApiError(404, 'not_at_known_place', 'nothing');
    state = failRequest(begun.state, 'location', begun.requestId, error);
    expect(state.modes.location.result).toBeNull();
    expect(state.modes.location.error).toBe(error);
  });

  it('drops completions that were superseded by a newer submission', () => {
    const state0 = initialState<string>();
    const first = beginRequest(state0, 'image');
    const second = beginRequest(first.state, 'image');

    // the older request finishes last; its result must not surface
    let state = completeRequest(second.state, 'image', second.requestId, 'new');
    state = completeRequest(state, 'image', first.requestId, 'old');
    expect(state.modes.image.result).toBe('new');

    // a stale failure is equally ignored
    state = failRequest(state, 'image', first.requestId,
      new ApiError(0, 'network_error', 'late'));
    expect(state.modes.image.error).toBeNull();
    expect(state.modes.image.result).toBe('new');
  });

  it('keeps at most one pending request per mode, independently', () => {
    const state0 = initialState<number>();
    const a = beginRequest(state0, 'list');
    const b = beginRequest(a.state, 'location');
    expect(b.state.modes.list.pending).toBe(true);
    expect(b.state.modes.location.pending).toBe(true);
    const done = completeRequest(b.state, 'list', a.requestId, 1);
    expect(done.modes.list.pending).toBe(false);
    expect(done.modes.location.pending).toBe(true);
  });
});
