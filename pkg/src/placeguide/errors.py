"""Exception hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` so transport layers
(HTTP service, CLI) can map failures without string matching.
"""


class GuideError(Exception):
    """Base class for all engine errors."""

    code = "error"


class InvalidArgumentError(GuideError, ValueError):
    """A caller-supplied value is outside its documented domain."""

    code = "invalid_argument"


class NotFoundError(GuideError):
    """A referenced entity (dua, place) does not exist."""

    code = "not_found"


class CatalogError(GuideError):
    code = "catalog_error"


class CatalogNotFoundError(CatalogError):
    code = "catalog_not_found"


class CatalogParseError(CatalogError):
    """The catalog document is structurally malformed (bad JSON, wrong
    types, missing or unknown fields)."""

    code = "catalog_parse_error"


class CatalogValidationError(CatalogError):
    """The catalog document is well-formed but violates a data invariant
    (duplicate ids, dangling references, out-of-range values)."""

    code = "catalog_invalid"


class DatasetError(GuideError):
    """A training or evaluation image folder is unusable."""

    code = "dataset_error"


class ImageDecodeError(GuideError):
    """Supplied bytes are not a decodable PNG/JPEG image."""

    code = "decode_error"


class IndexFormatError(GuideError):
    """A serialized descriptor index is corrupt or has an unknown format."""

    code = "index_format_error"


class IndexStateError(GuideError):
    """The descriptor index cannot serve queries (e.g. it is empty)."""

    code = "invalid_state"


class GpsActivationRequiredError(GuideError):
    """Location resolution was requested while GPS is disabled; the client
    must prompt the user to enable it."""

    code = "gps_activation_required"


class PermissionRequiredError(GuideError):
    """Location resolution was requested without location permission; the
    client must request it."""

    code = "permission_required"


class NotAtKnownPlaceError(GuideError):
    """No cataloged place lies within its geofence of the given position."""

    code = "not_at_known_place"


class UnrecognizedSceneError(GuideError):
    """No classifier label cleared the acceptance threshold."""

    code = "unrecognized_scene"


class LabelWithoutPlaceError(GuideError):
    """The classifier selected a label that matches no cataloged place name;
    signals catalog/model drift."""

    code = "label_without_place"
