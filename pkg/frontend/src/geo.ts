// Browser geolocation wrapped in a promise. A denial rejects with the
// ApiError code 'geolocation_denied' so the error view can show the
// permission guidance; other failures map to 'geolocation_unavailable'.

import { ApiError } from './api.js';

export interface GeoProvider {
  getCurrentPosition(
    onSuccess: (position: { coords: { latitude: number; longitude: number } }) => void,
    onError: (error: { code: number; message: string }) => void,
    options?: { enableHighAccuracy?: boolean; timeout?: number },
  ): void;
}

const PERMISSION_DENIED = 1;

export function currentPosition(
  provider: GeoProvider | undefined = globalThis.navigator?.geolocation,
): Promise<{ lat: number; lon: number }> {
  return new Promise((resolve, reject) => {
    if (!provider) {
      reject(new ApiError(0, 'geolocation_unavailable', 'geolocation is not available'));
      return;
    }
    provider.getCurrentPosition(
      (position) =>
        resolve({ lat: position.coords.latitude, lon: position.coords.longitude }),
      (error) => {
        if (error.code === PERMISSION_DENIED) {
          reject(new ApiError(0, 'geolocation_denied', 'location permission denied'));
        } else {
          reject(new ApiError(0, 'geolocation_unavailable', error.message));
        }
      },
      { enableHighAccuracy: true, timeout: 10_000 },
    );
  });
}
