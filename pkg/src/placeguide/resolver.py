"""Three-way content resolution: manual choice, location, or image.

The resolver is headless: GPS and permission states arrive as request data,
and every "no match" outcome is an explicit error rather than an empty
response, so clients can map each case to its own prompt. Location and
image modes never return general (place-less) duas; those are reachable
through the manual list only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .catalog import Catalog, Dua, Place, duas_for_place, nearest_place
from .errors import (
    GpsActivationRequiredError,
    IndexStateError,
    InvalidArgumentError,
    LabelWithoutPlaceError,
    NotAtKnownPlaceError,
    PermissionRequiredError,
    UnrecognizedSceneError,
)
from .geodesy import GeoPoint
from .recognizer import (
    LabelScore,
    ReferenceIndex,
    SelectionPolicy,
    classify,
    select_place,
)


@dataclass(frozen=True)
class LocationAvailable:
    """A usable GPS fix."""

    point: GeoPoint


@dataclass(frozen=True)
class GpsDisabled:
    """Location requested while the positioning hardware is off."""


@dataclass(frozen=True)
class PermissionDenied:
    """Location requested without the user's permission grant."""


LocationStatus = Union[LocationAvailable, GpsDisabled, PermissionDenied]


@dataclass(frozen=True)
class ManualRequest:
    dua_id: str


@dataclass(frozen=True)
class LocationRequest:
    status: LocationStatus


@dataclass(frozen=True)
class ImageRequest:
    data: bytes


GuideRequest = Union[ManualRequest, LocationRequest, ImageRequest]


@dataclass(frozen=True)
class Diagnostics:
    distance_m: Optional[float] = None
    label_scores: Optional[tuple[LabelScore, ...]] = None

    def to_dict(self) -> dict:
        return {
            "distance_m": self.distance_m,
            "label_scores": (
                None
                if self.label_scores is None
                else [score.to_dict() for score in self.label_scores]
            ),
        }


@dataclass(frozen=True)
class GuideResponse:
    """A matched place (when any) and the duas to display."""

    mode: str
    matched_place: Optional[Place]
    duas: tuple[Dua, ...]
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "matched_place": (
                None if self.matched_place is None else self.matched_place.to_dict()
            ),
            "duas": [dua.to_dict() for dua in self.duas],
            "diagnostics": self.diagnostics.to_dict(),
        }


def resolve_manual(catalog: Catalog, dua_id: str) -> GuideResponse:
    """Return the single dua the user picked from the list.

    Raises NotFoundError for an unknown id.
    """
    dua = catalog.dua(dua_id)
    matched = catalog.place(dua.place_id) if dua.place_id is not None else None
    return GuideResponse(mode="manual", matched_place=matched, duas=(dua,))


def resolve_location(catalog: Catalog, status: LocationStatus) -> GuideResponse:
    """Resolve by position: the nearest place whose geofence contains it.

    GpsDisabled and PermissionDenied raise the matching client-action
    errors; a fix that lands inside no geofence raises
    NotAtKnownPlaceError.
    """
    if isinstance(status, GpsDisabled):
        raise GpsActivationRequiredError("GPS is disabled; ask the user to enable it")
    if isinstance(status, PermissionDenied):
        raise PermissionRequiredError(
            "location permission not granted; ask the user to grant it"
        )
    match = nearest_place(catalog, status.point)
    if match is None:
        raise NotAtKnownPlaceError(
            "no known place within its geofence of the given position"
        )
    place, distance = match
    return GuideResponse(
        mode="location",
        matched_place=place,
        duas=duas_for_place(catalog, place.id),
        diagnostics=Diagnostics(distance_m=distance),
    )


def resolve_image(
    catalog: Catalog,
    index: ReferenceIndex,
    data: bytes,
    policy: SelectionPolicy = SelectionPolicy(),
) -> GuideResponse:
    """Resolve by photo: classify, threshold, then match label to place.

    Raises UnrecognizedSceneError when no label clears the acceptance
    threshold and LabelWithoutPlaceError when the winning label matches no
    cataloged place name (catalog/model drift).
    """
    scores = classify(data, index)
    selection = select_place(scores, policy)
    if selection.top is None:
        raise UnrecognizedSceneError(
            "no label cleared the acceptance threshold for this image"
        )
    place = catalog.place_by_name(selection.top)
    if place is None:
        raise LabelWithoutPlaceError(
            f"classifier label {selection.top!r} matches no cataloged place name"
        )
    return GuideResponse(
        mode="image",
        matched_place=place,
        duas=duas_for_place(catalog, place.id),
        diagnostics=Diagnostics(label_scores=selection.ranked),
    )


def resolve(
    request: GuideRequest,
    catalog: Catalog,
    index: Optional[ReferenceIndex] = None,
    policy: SelectionPolicy = SelectionPolicy(),
) -> GuideResponse:
    """Dispatch a request to its mode-specific resolution."""
    if isinstance(request, ManualRequest):
        return resolve_manual(catalog, request.dua_id)
    if isinstance(request, LocationRequest):
        return resolve_location(catalog, request.status)
    if isinstance(request, ImageRequest):
        if index is None:
            raise IndexStateError("image resolution requires a loaded index")
        return resolve_image(catalog, index, request.data, policy)
    raise InvalidArgumentError(f"unknown request type {type(request).__name__}")
