"""Operator command line: serve, validate, build/evaluate the index, and
resolve offline.

Data goes to stdout, diagnostics to stderr; exit code 0 means the operation
fully succeeded. ``--json`` switches data output to the same wire schemas
the HTTP service uses. Setting the QUIET environment variable suppresses
informational chatter (useful in CI logs).
"""

from __future__ import annotations

import functools
import json
import os
from pathlib import Path

import click

from . import service as service_mod
from .catalog import list_duas, load_catalog
from .errors import GuideError
from .geodesy import GeoPoint
from .recognizer import (
    DescriptorParams,
    SelectionPolicy,
    build_index,
    classify,
    evaluate_index,
    load_index,
    save_index,
    select_place,
)
from .resolver import LocationAvailable, resolve_location


def _quiet() -> bool:
    return bool(os.environ.get("QUIET"))


def _info(message: str) -> None:
    if not _quiet():
        click.echo(message, err=True)


def _fail(exc: GuideError, as_json: bool) -> "click.exceptions.Exit":
    if as_json:
        click.echo(json.dumps({"ok": False, "error": {"code": exc.code, "message": str(exc)}}))
    click.echo(f"error [{exc.code}]: {exc}", err=True)
    return click.exceptions.Exit(1)


def _engine_errors(fn):
    """Map engine errors to exit code 1 with a diagnostic on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        as_json = kwargs.get("as_json", False)
        try:
            return fn(*args, **kwargs)
        except GuideError as exc:
            raise _fail(exc, as_json)

    return wrapper


@click.group()
def main():
    """Point-of-interest guide engine tools."""


@main.command("serve")
@click.option("--catalog", "catalog_path", required=True, envvar="PLACEGUIDE_CATALOG",
              help="Path to the catalog JSON file.")
@click.option("--index", "index_path", required=True, envvar="PLACEGUIDE_INDEX",
              help="Path to the descriptor index directory.")
@click.option("--host", default="127.0.0.1", envvar="PLACEGUIDE_HOST", show_default=True)
@click.option("--port", default=8000, type=int, envvar="PLACEGUIDE_PORT", show_default=True)
@click.option("--assets", "asset_dir", default=None, envvar="PLACEGUIDE_ASSETS",
              help="Directory of static UI files to serve at /.")
@click.option("--cors/--no-cors", "allow_cors", default=False,
              help="Allow cross-origin requests from any origin.")
@click.option("--floor", type=float, default=None, help="Confidence floor override.")
@click.option("--accept", type=float, default=None, help="Acceptance threshold override.")
def serve(catalog_path, index_path, host, port, asset_dir, allow_cors, floor, accept):
    """Start the HTTP service."""
    import uvicorn

    config = service_mod.ServiceConfig(
        catalog_path=catalog_path,
        index_path=index_path,
        host=host,
        port=port,
        floor=floor,
        accept=accept,
        asset_dir=asset_dir,
        allow_cors=allow_cors,
    )
    try:
        app = service_mod.create_app(config)
    except GuideError as exc:
        raise _fail(exc, as_json=False)
    _info(f"serving on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port,
                log_level="warning" if _quiet() else "info")


@main.command("catalog-validate")
@click.argument("path", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_engine_errors
def catalog_validate(path, as_json):
    """Validate a catalog file; print OK or the first error."""
    catalog = load_catalog(path)
    if as_json:
        click.echo(json.dumps({
            "ok": True,
            "version": catalog.version,
            "places": len(catalog.places),
            "duas": len(catalog.duas),
        }))
    else:
        click.echo(f"OK: {len(catalog.places)} places, {len(catalog.duas)} duas")


@main.command("index-build")
@click.option("--train", "train_dir", required=True, type=click.Path(),
              help="Directory of per-label image folders.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Output index directory.")
@click.option("--grid-size", default=4, show_default=True, type=int)
@click.option("--bins", default=8, show_default=True, type=int)
@click.option("--temperature", default=0.05, show_default=True, type=float)
@click.option("--name", default="reference-classifier", show_default=True)
@click.option("--model-version", default="1", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_engine_errors
def index_build(train_dir, out_dir, grid_size, bins, temperature, name,
                model_version, as_json):
    """Build a descriptor index from training images."""
    params = DescriptorParams(grid_size=grid_size, histogram_bins=bins,
                              temperature=temperature)
    index = build_index(train_dir, params=params, name=name, version=model_version)
    save_index(index, out_dir)
    if as_json:
        click.echo(json.dumps({
            "ok": True,
            "out": str(out_dir),
            "labels": list(index.manifest.labels),
            "descriptors": index.descriptor_count,
        }))
    else:
        _info(f"indexed {index.descriptor_count} images")
        click.echo(
            f"built index at {out_dir}: "
            f"{len(index.manifest.labels)} labels, {index.descriptor_count} descriptors"
        )


@main.command("index-eval")
@click.option("--index", "index_dir", required=True, type=click.Path())
@click.option("--test", "test_dir", required=True, type=click.Path(),
              help="Directory of per-label image folders.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_engine_errors
def index_eval(index_dir, test_dir, as_json):
    """Evaluate top-1 accuracy and print the confusion matrix."""
    index = load_index(index_dir)
    report = evaluate_index(index, test_dir)
    if as_json:
        click.echo(json.dumps({"ok": True, "labels": list(index.manifest.labels),
                               **report.to_dict()}))
        return
    labels = list(index.manifest.labels)
    click.echo(f"accuracy: {report.accuracy:.3f} ({report.total} images)")
    header = "true\\pred".ljust(16) + "".join(label[:14].rjust(16) for label in labels)
    click.echo(header)
    for true_label in labels:
        row = report.confusion[true_label]
        cells = "".join(str(row[p]).rjust(16) for p in labels)
        click.echo(true_label[:14].ljust(16) + cells)


@main.command("classify")
@click.option("--index", "index_dir", required=True, type=click.Path())
@click.option("--floor", type=float, default=None, help="Confidence floor override.")
@click.option("--accept", type=float, default=None, help="Acceptance threshold override.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.argument("image", type=click.Path())
@_engine_errors
def classify_cmd(index_dir, floor, accept, as_json, image):
    """Rank labels for an image and apply the selection policy."""
    index = load_index(index_dir)
    defaults = SelectionPolicy()
    policy = SelectionPolicy(
        floor=defaults.floor if floor is None else floor,
        accept=defaults.accept if accept is None else accept,
    )
    try:
        data = Path(image).read_bytes()
    except OSError as exc:
        click.echo(f"error: cannot read {image}: {exc}", err=True)
        raise click.exceptions.Exit(1)
    scores = classify(data, index)
    selection = select_place(scores, policy)
    if as_json:
        click.echo(json.dumps({
            "scores": [s.to_dict() for s in scores],
            "ranked": [s.to_dict() for s in selection.ranked],
            "selected": selection.top,
        }))
        return
    for score in scores:
        click.echo(f"{score.confidence:.4f}  {score.label}")
    if selection.top is None:
        click.echo("no place selected (no label cleared the acceptance threshold)")
    else:
        click.echo(f"selected: {selection.top}")


@main.command("resolve-location")
@click.option("--catalog", "catalog_path", required=True, type=click.Path())
@click.option("--lat", required=True, type=float)
@click.option("--lon", required=True, type=float)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_engine_errors
def resolve_location_cmd(catalog_path, lat, lon, as_json):
    """Resolve a position against the catalog and print the matched content."""
    catalog = load_catalog(catalog_path)
    response = resolve_location(catalog, LocationAvailable(GeoPoint(lat, lon)))
    if as_json:
        click.echo(json.dumps(response.to_dict()))
        return
    place = response.matched_place
    click.echo(f"{place.name} ({response.diagnostics.distance_m:.1f} m away)")
    for dua in response.duas:
        click.echo(f"- [{dua.order}] {dua.title}")
        click.echo(f"  {dua.body}")


@main.command("list-duas")
@click.option("--catalog", "catalog_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@_engine_errors
def list_duas_cmd(catalog_path, as_json):
    """Print the manual-mode dua list."""
    catalog = load_catalog(catalog_path)
    duas = list_duas(catalog)
    if as_json:
        click.echo(json.dumps([d.to_dict() for d in duas]))
        return
    for dua in duas:
        place = f" @{dua.place_id}" if dua.place_id else ""
        click.echo(f"{dua.id}{place}: {dua.title}")


if __name__ == "__main__":
    main()
