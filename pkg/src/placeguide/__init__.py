"""Location- and image-aware point-of-interest guide engine.

Given a position, a photo, or a manual pick, resolves the matching place
and returns its content items. See the README for the HTTP and CLI
surfaces.
"""

from .catalog import (
    Catalog,
    DEFAULT_GEOFENCE_RADIUS_M,
    Dua,
    Place,
    duas_for_place,
    list_duas,
    load_catalog,
    nearest_place,
)
from .geodesy import (
    EARTH_RADIUS_M,
    EarthModel,
    GeoPoint,
    haversine_distance,
    to_radians,
    within_radius,
)
from .recognizer import (
    DescriptorParams,
    EvaluationReport,
    LabelScore,
    ModelManifest,
    ReferenceIndex,
    Selection,
    SelectionPolicy,
    build_index,
    classify,
    evaluate_index,
    extract_descriptor,
    load_index,
    save_index,
    select_place,
)
from .resolver import (
    Diagnostics,
    GpsDisabled,
    GuideResponse,
    ImageRequest,
    LocationAvailable,
    LocationRequest,
    ManualRequest,
    PermissionDenied,
    resolve,
    resolve_image,
    resolve_location,
    resolve_manual,
)

__all__ = [name for name in dir() if not name.startswith("_")]
