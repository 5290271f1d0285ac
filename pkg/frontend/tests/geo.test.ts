import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api.js';
import { currentPosition, type GeoProvider } from '../src/geo.js';

function provider(
  behavior: (onSuccess: Parameters<GeoProvider['getCurrentPosition']>[0],
             onError: Parameters<GeoProvider['getCurrentPosition']>[1]) => void,
): GeoProvider {
  return { getCurrentPosition: (onSuccess, onError) => behavior(onSuccess, onError) };
}

describe('currentPosition', () => {
  it('resolves with the fix coordinates', async () => {
    const geo = provider((onSuccess) =>
      onSuccess({ coords: { latitude: 21.4225, longitude: 39.8262 } }),
    );
    await expect(currentPosition(geo)).resolves.toEqual({ lat: 21.4225, lon: 39.8262 });
  });

  it('maps a permission denial to the guidance error code', async () => {
    const geo = provider((_, onError) => onError({ code: 1, message: 'denied' }));
    const failure = await currentPosition(geo).catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.code).toBe('geolocation_denied');
  });

  it('maps other failures to unavailable', async () => {
    const geo = provider((_, onError) => onError({ code: 2, message: 'no signal' }));
    const failure = await currentPosition(geo).catch((e) => e);
    expect(failure.code).toBe('geolocation_unavailable');
  });

  it('rejects when the browser offers no geolocation', async () => {
    const failure = await currentPosition(undefined).catch((e) => e);
    expect(failure.code).toBe('geolocation_unavailable');
  });
});
