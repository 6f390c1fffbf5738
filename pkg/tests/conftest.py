import pytest

from engine_workbench.catalog import builtin_catalog_dir, load_catalog

FIXTURE_TASK = "engine_attachment_removal"


@pytest.fixture(scope="session")
def catalog_dir():
    return builtin_catalog_dir()


@pytest.fixture(scope="session")
def fixture_catalog(catalog_dir):
    catalog, report = load_catalog(catalog_dir)
    assert report.ok, [str(e) for e in report.errors]
    return catalog
