// Pure view-model builders. Numbers shown to the user are taken verbatim
// from the API responses; formatting only trims displayed digits.

import { ApiError } from './api.js';
import type { Dua, GuideResponse, LabelScore } from './types.js';

export interface DuaRowView {
  id: string;
  title: string;
  placeId: string | null;
}

export type DuaListView =
  | { kind: 'empty' }
  | { kind: 'list'; rows: DuaRowView[] };

export function duaListView(duas: Dua[]): DuaListView {
  if (duas.length === 0) {
    return { kind: 'empty' };
  }
  return {
    kind: 'list',
    rows: duas.map((d) => ({ id: d.id, title: d.title, placeId: d.place_id })),
  };
}

export interface ResultView {
  placeName: string | null;
  distanceText: string | null;
  scores: { label: string; confidenceText: string }[] | null;
  duas: { title: string; body: string }[];
}

export function formatDistance(distanceM: number): string {
  return `${distanceM.toFixed(1)} m`;
}

export function formatConfidence(score: LabelScore): string {
  return score.confidence.toFixed(3);
}

export function resultView(response: GuideResponse): ResultView {
  const { matched_place, diagnostics } = response;
  return {
    placeName: matched_place ? matched_place.name : null,
    distanceText:
      diagnostics.distance_m === null ? null : formatDistance(diagnostics.distance_m),
    scores:
      diagnostics.label_scores === null
        ? null
        : diagnostics.label_scores.map((s) => ({
            label: s.label,
            confidenceText: formatConfidence(s),
          })),
    duas: response.duas.map((d) => ({ title: d.title, body: d.body })),
  };
}

export interface ErrorView {
  message: string;
  retryable: boolean;
  kind: 'banner' | 'guidance' | 'inline';
}

export interface LocationContext {
  lat: number;
  lon: number;
}

export function errorView(error: ApiError, context?: LocationContext): ErrorView {
  switch (error.code) {
    case 'not_at_known_place': {
      const at = context ? ` at (${context.lat}, ${context.lon})` : '';
      return {
        message: `No known place nearby${at}.`,
        retryable: false,
        kind: 'banner',
      };
    }
    case 'permission_required':
    case 'geolocation_denied':
      return {
        message:
          'Location permission is required. Allow location access in your browser, then try again.',
        retryable: false,
        kind: 'guidance',
      };
    case 'gps_activation_required':
      return {
        message: 'Positioning is disabled. Enable GPS/location services, then try again.',
        retryable: false,
        kind: 'guidance',
      };
    case 'unrecognized_scene':
      return {
        message: 'Place not recognized in this photo. Try another angle or pick from the list.',
        retryable: false,
        kind: 'banner',
      };
    case 'network_error':
      return { message: 'Cannot reach the guide service.', retryable: true, kind: 'banner' };
    default:
      return { message: error.message, retryable: error.retryable, kind: 'inline' };
  }
}

/** Client-side pre-check before uploading; mirrors the server's decode/413 errors. */
export function validateImageFile(
  file: { type: string; size: number },
  maxBytes = 8 * 1024 * 1024,
): string | null {
  if (!file.type.startsWith('image/')) {
    return 'Please choose an image file (PNG or JPEG).';
  }
  if (file.size > maxBytes) {
    return `Image is too large (limit ${Math.floor(maxBytes / (1024 * 1024))} MiB).`;
  }
  return null;
}
