#!/usr/bin/env python3
"""Regenerate the committed fixtures: descriptor index, query images, and
the golden HTTP request/response examples under docs/api_examples/.

Everything is seeded, so re-running this script on an unchanged tree is a
no-op diff. The synthetic training images themselves are throwaway (built
in a temp dir); only the index they produce is committed.

Usage: python scripts/make_fixtures.py
"""

from __future__ import annotations

import base64
import json
import sys
import tempfile
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from placeguide.recognizer import build_index, save_index  # noqa: E402
from placeguide.service import ServiceConfig, create_app  # noqa: E402
from placeguide.synthdata import (  # noqa: E402
    DEFAULT_LABELS,
    class_image,
    generate_dataset,
    noise_image,
    write_png,
)

TRAIN_SEED = 20240901
QUERY_SEED = 20240902
NOISE_SEED = 20240903
PER_LABEL = 30

QUERY_FILES = {
    "Kaaba": "kaaba_query.png",
    "Zamzam": "zamzam_query.png",
    "Maqam Ibrahim": "maqam_ibrahim_query.png",
}


def build_fixture_index(out_dir: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        generate_dataset(tmp, per_label=PER_LABEL, seed=TRAIN_SEED)
        index = build_index(tmp, name="fixture-classifier", version="1")
        save_index(index, out_dir)
    print(f"wrote {out_dir} ({index.descriptor_count} descriptors)")


def write_query_images(out_dir: Path) -> None:
    rng = np.random.default_rng(QUERY_SEED)
    for class_index, label in enumerate(DEFAULT_LABELS):
        write_png(class_image(rng, class_index), out_dir / QUERY_FILES[label])
    write_png(noise_image(np.random.default_rng(NOISE_SEED)), out_dir / "noise_query.png")
    print(f"wrote {out_dir} ({len(QUERY_FILES) + 1} query images)")


def write_goldens(fixtures: Path, out_dir: Path) -> None:
    """Replay canonical requests against the fixture service and pin the
    responses as golden files."""
    from fastapi.testclient import TestClient

    app = create_app(ServiceConfig(
        catalog_path=str(fixtures / "catalog.json"),
        index_path=str(fixtures / "index"),
    ))
    client = TestClient(app)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run(name: str, method: str, path: str, *, json_body=None, image_file=None):
        if image_file is not None:
            data = (fixtures / "images" / image_file).read_bytes()
            response = client.post(
                path, files={"image": (image_file, data, "image/png")}
            )
            request = {"method": method, "path": path, "image_file": image_file}
        elif json_body is not None:
            response = client.request(method, path, json=json_body)
            request = {"method": method, "path": path, "json": json_body}
        else:
            response = client.request(method, path)
            request = {"method": method, "path": path}
        golden = {
            "name": name,
            "request": request,
            "response": {"status": response.status_code, "json": response.json()},
        }
        path_out = out_dir / f"{name}.json"
        path_out.write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")

    run("health", "GET", "/api/health")
    run("list_places", "GET", "/api/places")
    run("list_duas", "GET", "/api/duas")
    run("dua_detail", "GET", "/api/duas/kaaba-sighting")
    run("dua_unknown", "GET", "/api/duas/nope")
    run("model_manifest", "GET", "/api/model/manifest")
    run("resolve_location_at_place", "POST", "/api/resolve/location",
        json_body={"lat": 21.4225, "lon": 39.8262})
    run("resolve_location_gps_disabled", "POST", "/api/resolve/location",
        json_body={"status": "gps_disabled"})
    run("resolve_location_permission_denied", "POST", "/api/resolve/location",
        json_body={"status": "permission_denied"})
    run("resolve_location_nowhere", "POST", "/api/resolve/location",
        json_body={"lat": 0.0, "lon": 0.0})
    run("resolve_location_bad_lat", "POST", "/api/resolve/location",
        json_body={"lat": 91, "lon": 0})
    run("resolve_image_match", "POST", "/api/resolve/image",
        image_file="kaaba_query.png")
    run("resolve_image_unrecognized", "POST", "/api/resolve/image",
        image_file="noise_query.png")

    # base64 variant of the same match, pinning the JSON transport
    data = (fixtures / "images" / "zamzam_query.png").read_bytes()
    response = client.post("/api/resolve/image",
                           json={"image_b64": base64.b64encode(data).decode()})
    golden = {
        "name": "resolve_image_b64_match",
        "request": {"method": "POST", "path": "/api/resolve/image",
                    "image_b64_of": "zamzam_query.png"},
        "response": {"status": response.status_code, "json": response.json()},
    }
    (out_dir / "resolve_image_b64_match.json").write_text(
        json.dumps(golden, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {out_dir} ({len(list(out_dir.glob('*.json')))} goldens)")


def main() -> None:
    fixtures = REPO / "fixtures"
    build_fixture_index(fixtures / "index")
    write_query_images(fixtures / "images")
    write_goldens(fixtures, REPO / "docs" / "api_examples")


if __name__ == "__main__":
    main()
