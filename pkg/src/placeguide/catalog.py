"""Place/content catalog: loading, validation, and queries.

The catalog is a single UTF-8 JSON document::

    {
      "version": "1",
      "places": [
        {"id": "kaaba", "name": "Kaaba", "lat": 21.4225, "lon": 39.8262,
         "geofence_radius_m": 21}
      ],
      "duas": [
        {"id": "kaaba-sighting", "place_id": "kaaba",
         "title": "...", "body": "...", "order": 0}
      ]
    }

``geofence_radius_m`` is optional (default 21 m). ``place_id`` is optional;
a dua without one is "general" content not tied to any place. Unknown fields
are rejected so typos surface as errors instead of silently vanishing. A
catalog is validated completely at load time and immutable afterwards;
updates are whole-file reloads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import (
    CatalogNotFoundError,
    CatalogParseError,
    CatalogValidationError,
    InvalidArgumentError,
    NotFoundError,
)
from .geodesy import GeoPoint, haversine_distance

#: Geofence radius (meters) applied when a place does not set its own.
DEFAULT_GEOFENCE_RADIUS_M = 21.0


@dataclass(frozen=True)
class Place:
    """A named point of interest. ``name`` doubles as the classifier label."""

    id: str
    name: str
    location: GeoPoint
    geofence_radius_m: float = DEFAULT_GEOFENCE_RADIUS_M

    def __post_init__(self) -> None:
        if not self.id:
            raise InvalidArgumentError("place id must be non-empty")
        if not self.name:
            raise InvalidArgumentError(f"place {self.id!r}: name must be non-empty")
        if not (
            math.isfinite(self.geofence_radius_m) and self.geofence_radius_m > 0.0
        ):
            raise InvalidArgumentError(
                f"place {self.id!r}: geofence_radius_m must be positive"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "lat": self.location.lat_deg,
            "lon": self.location.lon_deg,
            "geofence_radius_m": self.geofence_radius_m,
        }


@dataclass(frozen=True)
class Dua:
    """A content item, optionally attached to a place.

    ``order`` controls display ordering among duas of the same place.
    ``body`` is opaque text to the engine.
    """

    id: str
    title: str
    body: str
    order: int = 0
    place_id: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise InvalidArgumentError("dua id must be non-empty")
        if self.place_id is not None and not self.place_id:
            raise InvalidArgumentError(f"dua {self.id!r}: place_id must be non-empty")
        if not isinstance(self.order, int) or isinstance(self.order, bool) or self.order < 0:
            raise InvalidArgumentError(
                f"dua {self.id!r}: order must be a non-negative integer"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "place_id": self.place_id,
            "title": self.title,
            "body": self.body,
            "order": self.order,
        }


class Catalog:
    """Immutable, fully validated place/content dataset."""

    def __init__(self, places: Sequence[Place], duas: Sequence[Dua], version: str = "0"):
        self.places: tuple[Place, ...] = tuple(places)
        self.duas: tuple[Dua, ...] = tuple(duas)
        self.version = version
        self._validate()
        self._place_by_id = {p.id: p for p in self.places}

    def _validate(self) -> None:
        seen_ids: set[str] = set()
        seen_names: set[str] = set()
        for place in self.places:
            if place.id in seen_ids:
                raise CatalogValidationError(f"duplicate place id {place.id!r}")
            if place.name in seen_names:
                raise CatalogValidationError(
                    f"duplicate place name {place.name!r} (names join classifier labels)"
                )
            seen_ids.add(place.id)
            seen_names.add(place.name)

        seen_dua_ids: set[str] = set()
        seen_slots: set[tuple[str, int]] = set()
        for dua in self.duas:
            if dua.id in seen_dua_ids:
                raise CatalogValidationError(f"duplicate dua id {dua.id!r}")
            seen_dua_ids.add(dua.id)
            if dua.place_id is not None:
                if dua.place_id not in seen_ids:
                    raise CatalogValidationError(
                        f"dua {dua.id!r} references unknown place {dua.place_id!r}"
                    )
                slot = (dua.place_id, dua.order)
                if slot in seen_slots:
                    raise CatalogValidationError(
                        f"dua {dua.id!r} reuses order {dua.order} of place {dua.place_id!r}"
                    )
                seen_slots.add(slot)

    def place(self, place_id: str) -> Place:
        try:
            return self._place_by_id[place_id]
        except KeyError:
            raise NotFoundError(f"unknown place id {place_id!r}") from None

    def place_by_name(self, name: str) -> Optional[Place]:
        for place in self.places:
            if place.name == name:
                return place
        return None

    def dua(self, dua_id: str) -> Dua:
        for dua in self.duas:
            if dua.id == dua_id:
                return dua
        raise NotFoundError(f"unknown dua id {dua_id!r}")


_TOP_FIELDS = {"version", "places", "duas"}
_PLACE_FIELDS = {"id", "name", "lat", "lon", "geofence_radius_m"}
_DUA_FIELDS = {"id", "place_id", "title", "body", "order"}


def _check_record(value: object, where: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise CatalogParseError(f"{where}: expected an object")
    unknown = set(value) - allowed
    if unknown:
        raise CatalogParseError(
            f"{where}: unknown field(s) {', '.join(sorted(unknown))}"
        )
    return value


def _get_str(record: dict, key: str, where: str) -> str:
    if key not in record:
        raise CatalogParseError(f"{where}: missing required field {key!r}")
    value = record[key]
    if not isinstance(value, str):
        raise CatalogParseError(f"{where}.{key}: expected a string")
    return value


def _get_number(record: dict, key: str, where: str) -> float:
    if key not in record:
        raise CatalogParseError(f"{where}: missing required field {key!r}")
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CatalogParseError(f"{where}.{key}: expected a number")
    return float(value)


def _parse_place(record: object, where: str) -> Place:
    rec = _check_record(record, where, _PLACE_FIELDS)
    place_id = _get_str(rec, "id", where)
    name = _get_str(rec, "name", where)
    lat = _get_number(rec, "lat", where)
    lon = _get_number(rec, "lon", where)
    if not math.isfinite(lat) or not -90.0 <= lat <= 90.0:
        raise CatalogValidationError(f"{where}.lat: {lat} outside [-90, 90]")
    if not math.isfinite(lon):
        raise CatalogValidationError(f"{where}.lon: must be finite")
    radius = DEFAULT_GEOFENCE_RADIUS_M
    if "geofence_radius_m" in rec:
        radius = _get_number(rec, "geofence_radius_m", where)
        if not math.isfinite(radius) or radius <= 0.0:
            raise CatalogValidationError(
                f"{where}.geofence_radius_m: must be positive"
            )
    try:
        return Place(id=place_id, name=name, location=GeoPoint(lat, lon),
                     geofence_radius_m=radius)
    except InvalidArgumentError as exc:
        raise CatalogValidationError(f"{where}: {exc}") from None


def _parse_dua(record: object, where: str) -> Dua:
    rec = _check_record(record, where, _DUA_FIELDS)
    dua_id = _get_str(rec, "id", where)
    title = _get_str(rec, "title", where)
    body = _get_str(rec, "body", where)
    if "order" not in rec:
        raise CatalogParseError(f"{where}: missing required field 'order'")
    order = rec["order"]
    if isinstance(order, bool) or not isinstance(order, int):
        raise CatalogParseError(f"{where}.order: expected an integer")
    if order < 0:
        raise CatalogValidationError(f"{where}.order: must be non-negative")
    place_id = rec.get("place_id")
    if place_id is not None and not isinstance(place_id, str):
        raise CatalogParseError(f"{where}.place_id: expected a string or null")
    try:
        return Dua(id=dua_id, title=title, body=body, order=order, place_id=place_id)
    except InvalidArgumentError as exc:
        raise CatalogValidationError(f"{where}: {exc}") from None


def load_catalog(path: str | Path) -> Catalog:
    """Load and fully validate a catalog file.

    Rejects rather than repairs: the first structural problem raises
    CatalogParseError (naming the field), the first data-invariant problem
    raises CatalogValidationError (naming the offending ids).
    """
    file_path = Path(path)
    if not file_path.exists():
        raise CatalogNotFoundError(f"catalog file not found: {file_path}")
    text = file_path.read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogParseError(
            f"{file_path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None

    root = _check_record(document, "catalog", _TOP_FIELDS)
    version = _get_str(root, "version", "catalog")
    for key in ("places", "duas"):
        if key not in root:
            raise CatalogParseError(f"catalog: missing required field {key!r}")
        if not isinstance(root[key], list):
            raise CatalogParseError(f"catalog.{key}: expected an array")

    places = [
        _parse_place(rec, f"places[{i}]") for i, rec in enumerate(root["places"])
    ]
    duas = [_parse_dua(rec, f"duas[{i}]") for i, rec in enumerate(root["duas"])]
    return Catalog(places=places, duas=duas, version=version)


def _dua_sort_key(catalog: Catalog, dua: Dua) -> tuple:
    place_name = ""
    if dua.place_id is not None:
        place_name = catalog._place_by_id[dua.place_id].name
    return (place_name, dua.order, dua.id)


def list_duas(catalog: Catalog) -> tuple[Dua, ...]:
    """All duas in deterministic display order.

    Ordered by (place name, order, id); general duas sort first under the
    empty place name.
    """
    return tuple(sorted(catalog.duas, key=lambda d: _dua_sort_key(catalog, d)))


def duas_for_place(catalog: Catalog, place_id: str) -> tuple[Dua, ...]:
    """Duas attached to a known place, sorted by order ascending.

    A known place with no duas yields an empty tuple; an unknown place id
    raises NotFoundError.
    """
    catalog.place(place_id)
    matched = [d for d in catalog.duas if d.place_id == place_id]
    return tuple(sorted(matched, key=lambda d: (d.order, d.id)))


def nearest_place(
    catalog: Catalog, point: GeoPoint
) -> Optional[tuple[Place, float]]:
    """The closest place whose geofence contains ``point``, with its distance.

    Evaluates every place (result is independent of catalog order), keeps
    those where the distance is strictly inside the place's own geofence
    radius, and picks the minimum distance; ties break on the
    lexicographically smallest place id. None when no place qualifies.
    """
    best: Optional[tuple[Place, float]] = None
    for place in catalog.places:
        distance = haversine_distance(point, place.location)
        if distance >= place.geofence_radius_m:  # same strict-< rule as within_radius
            continue
        if best is None or (distance, place.id) < (best[1], best[0].id):
            best = (place, distance)
    return best
