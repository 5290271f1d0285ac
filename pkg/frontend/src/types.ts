// Wire types mirroring the service's JSON schemas.

export interface Place {
  id: string;
  name: string;
  lat: number;
  lon: number;
  geofence_radius_m: number;
}

export interface Dua {
  id: string;
  place_id: string | null;
  title: string;
  body: string;
  order: number;
}

export interface LabelScore {
  label: string;
  confidence: number;
}

export interface Diagnostics {
  distance_m: number | null;
  label_scores: LabelScore[] | null;
}

export interface GuideResponse {
  mode: 'manual' | 'location' | 'image';
  matched_place: Place | null;
  duas: Dua[];
  diagnostics: Diagnostics;
}

export interface Health {
  version: string;
  catalog_version: string;
  places: number;
  duas: number;
  labels: string[];
}

export type LocationInput =
  | { lat: number; lon: number }
  | { status: 'gps_disabled' | 'permission_denied' };
