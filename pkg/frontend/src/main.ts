// DOM wiring. All data handling lives in the pure modules (api/state/
// format); this file only moves values between them and the document.

import { ApiError, getDuas, resolveImage, resolveLocation } from './api.js';
import {
  duaListView,
  errorView,
  resultView,
  validateImageFile,
  type LocationContext,
} from './format.js';
import { currentPosition } from './geo.js';
import {
  beginRequest,
  completeRequest,
  failRequest,
  initialState,
  switchMode,
  type AppState,
  type Mode,
} from './state.js';
import type { Dua, GuideResponse } from './types.js';

type Payload = Dua[] | GuideResponse;

let state: AppState<Payload> = initialState();
let locationContext: LocationContext | undefined;
let selectedDua: Dua | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setState(next: AppState<Payload>): void {
  state = next;
  render();
}

function renderError(container: HTMLElement, error: ApiError, context?: LocationContext,
                     onRetry?: () => void): void {
  const view = errorView(error, context);
  const banner = document.createElement('div');
  banner.className = `notice notice-${view.kind}`;
  banner.textContent = view.message;
  if (view.retryable && onRetry) {
    const retry = document.createElement('button');
    retry.textContent = 'Retry';
    retry.addEventListener('click', onRetry);
    banner.append(' ', retry);
  }
  container.replaceChildren(banner);
}

function renderGuideResponse(container: HTMLElement, response: GuideResponse): void {
  const view = resultView(response);
  container.replaceChildren();

  const heading = document.createElement('h3');
  heading.textContent = view.placeName ?? 'General content';
  container.append(heading);

  if (view.distanceText) {
    const distance = document.createElement('p');
    distance.className = 'distance';
    distance.textContent = `${view.distanceText} away`;
    container.append(distance);
  }

  if (view.scores) {
    const scores = document.createElement('ul');
    scores.className = 'scores';
    for (const score of view.scores) {
      const item = document.createElement('li');
      item.textContent = `${score.label}: ${score.confidenceText}`;
      scores.append(item);
    }
    container.append(scores);
  }

  for (const dua of view.duas) {
    const card = document.createElement('article');
    card.className = 'dua-card';
    const title = document.createElement('h4');
    title.textContent = dua.title;
    const body = document.createElement('p');
    body.textContent = dua.body;
    card.append(title, body);
    container.append(card);
  }
}

// ---- list mode -------------------------------------------------------

function loadDuaList(): void {
  const { state: next, requestId } = beginRequest(state, 'list');
  setState(next);
  getDuas().then(
    (duas) => setState(completeRequest(state, 'list', requestId, duas)),
    (error: ApiError) => setState(failRequest(state, 'list', requestId, error)),
  );
}

function renderList(): void {
  const container = el('list-content');
  const detail = el('list-detail');
  const mode = state.modes.list;
  if (mode.pending) {
    container.textContent = 'Loading…';
    return;
  }
  if (mode.error) {
    renderError(container, mode.error, undefined, loadDuaList);
    return;
  }
  const duas = (mode.result as Dua[] | null) ?? [];
  const view = duaListView(duas);
  if (view.kind === 'empty') {
    container.textContent = 'No content available.';
    detail.replaceChildren();
    return;
  }
  const list = document.createElement('ul');
  list.className = 'dua-list';
  for (const row of view.rows) {
    const item = document.createElement('li');
    const button = document.createElement('button');
    button.textContent = row.placeId ? `${row.title} — ${row.placeId}` : row.title;
    button.addEventListener('click', () => {
      selectedDua = duas.find((d) => d.id === row.id) ?? null;
      render();
    });
    item.append(button);
    list.append(item);
  }
  container.replaceChildren(list);

  detail.replaceChildren();
  if (selectedDua) {
    const title = document.createElement('h4');
    title.textContent = selectedDua.title;
    const body = document.createElement('p');
    body.textContent = selectedDua.body;
    detail.append(title, body);
  }
}

// ---- location mode ---------------------------------------------------

function submitLocation(lat: number, lon: number): void {
  locationContext = { lat, lon };
  const { state: next, requestId } = beginRequest(state, 'location');
  setState(next);
  resolveLocation({ lat, lon }).then(
    (response) => setState(completeRequest(state, 'location', requestId, response)),
    (error: ApiError) => setState(failRequest(state, 'location', requestId, error)),
  );
}

function useBrowserLocation(): void {
  const { state: next, requestId } = beginRequest(state, 'location');
  setState(next);
  currentPosition().then(
    (position) => {
      // hand back to the manual path so the fields echo the fix
      (el<HTMLInputElement>('lat-input')).value = String(position.lat);
      (el<HTMLInputElement>('lon-input')).value = String(position.lon);
      locationContext = position;
      resolveLocation(position).then(
        (response) => setState(completeRequest(state, 'location', requestId, response)),
        (error: ApiError) => setState(failRequest(state, 'location', requestId, error)),
      );
    },
    (error: ApiError) => setState(failRequest(state, 'location', requestId, error)),
  );
}

function renderLocation(): void {
  const container = el('location-result');
  const mode = state.modes.location;
  if (mode.pending) {
    container.textContent = 'Resolving…';
    return;
  }
  if (mode.error) {
    renderError(container, mode.error, locationContext);
    return;
  }
  if (mode.result) {
    renderGuideResponse(container, mode.result as GuideResponse);
  }
}

// ---- image mode ------------------------------------------------------

function submitImage(file: File): void {
  const problem = validateImageFile(file);
  const validation = el('image-validation');
  if (problem) {
    validation.textContent = problem;
    return;
  }
  validation.textContent = '';
  const { state: next, requestId } = beginRequest(state, 'image');
  setState(next);
  resolveImage(file, file.name).then(
    (response) => setState(completeRequest(state, 'image', requestId, response)),
    (error: ApiError) => setState(failRequest(state, 'image', requestId, error)),
  );
}

function renderImage(): void {
  const container = el('image-result');
  const mode = state.modes.image;
  if (mode.pending) {
    container.textContent = 'Classifying…';
    return;
  }
  if (mode.error) {
    renderError(container, mode.error);
    return;
  }
  if (mode.result) {
    renderGuideResponse(container, mode.result as GuideResponse);
  }
}

// ---- shell -----------------------------------------------------------

function render(): void {
  for (const mode of ['list', 'location', 'image'] as Mode[]) {
    el(`section-${mode}`).hidden = state.mode !== mode;
    el(`tab-${mode}`).classList.toggle('active', state.mode === mode);
  }
  renderList();
  renderLocation();
  renderImage();
}

export function start(): void {
  for (const mode of ['list', 'location', 'image'] as Mode[]) {
    el(`tab-${mode}`).addEventListener('click', () => setState(switchMode(state, mode)));
  }

  el<HTMLFormElement>('location-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const lat = Number(el<HTMLInputElement>('lat-input').value);
    const lon = Number(el<HTMLInputElement>('lon-input').value);
    if (!Number.isFinite(lat) || !Number.isFinite(lon)) {
      el('location-result').textContent = 'Enter numeric coordinates.';
      return;
    }
    submitLocation(lat, lon);
  });
  el('geolocate-button').addEventListener('click', useBrowserLocation);

  const fileInput = el<HTMLInputElement>('image-input');
  fileInput.addEventListener('change', () => {
    const file = fileInput.files?.[0];
    const preview = el<HTMLImageElement>('image-preview');
    if (file && file.type.startsWith('image/')) {
      preview.src = URL.createObjectURL(file);
      preview.hidden = false;
    } else {
      preview.hidden = true;
    }
  });
  el<HTMLFormElement>('image-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const file = fileInput.files?.[0];
    if (!file) {
      el('image-validation').textContent = 'Choose a photo first.';
      return;
    }
    submitImage(file);
  });

  loadDuaList();
  render();
}

start();
