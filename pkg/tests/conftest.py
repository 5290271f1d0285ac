import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"
GOLDEN_DIR = REPO_ROOT / "docs" / "api_examples"

sys.path.insert(0, str(Path(__file__).parent))

from placeguide.catalog import load_catalog
from placeguide.recognizer import build_index, load_index
from placeguide.synthdata import generate_dataset


@pytest.fixture(scope="session")
def fixture_catalog_path():
    return FIXTURES_DIR / "catalog.json"


@pytest.fixture(scope="session")
def fixture_index_path():
    return FIXTURES_DIR / "index"


@pytest.fixture(scope="session")
def fixture_images_dir():
    return FIXTURES_DIR / "images"


@pytest.fixture(scope="session")
def fixture_catalog(fixture_catalog_path):
    return load_catalog(fixture_catalog_path)


@pytest.fixture(scope="session")
def fixture_index(fixture_index_path):
    return load_index(fixture_index_path)


@pytest.fixture(scope="session")
def synth_dirs(tmp_path_factory):
    """Deterministic train/test folders of synthetic class images."""
    root = tmp_path_factory.mktemp("synth")
    train, test = root / "train", root / "test"
    generate_dataset(train, per_label=12, seed=11)
    generate_dataset(test, per_label=4, seed=22)
    return train, test


@pytest.fixture(scope="session")
def synth_index(synth_dirs):
    return build_index(synth_dirs[0])


@pytest.fixture(scope="session")
def service_client(fixture_catalog_path, fixture_index_path):
    from fastapi.testclient import TestClient

    from placeguide.service import ServiceConfig, create_app

    app = create_app(ServiceConfig(
        catalog_path=str(fixture_catalog_path),
        index_path=str(fixture_index_path),
    ))
    return TestClient(app)
