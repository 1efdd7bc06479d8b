from importlib import resources
from pathlib import Path

import pytest

from localfeatures import parse, parse_spl_definition, resolve

FIXTURES = Path(__file__).parent / "fixtures"


def packaged(name: str) -> str:
    return (resources.files("localfeatures") / "data" / name).read_text()


@pytest.fixture(scope="session")
def webeiel_source() -> str:
    return packaged("webeiel.gis")


@pytest.fixture(scope="session")
def gis_spl_source() -> str:
    return packaged("gis.spl")


@pytest.fixture(scope="session")
def webeiel_spec(webeiel_source):
    return parse(webeiel_source, filename="webeiel.gis")


@pytest.fixture(scope="session")
def gis_definition(gis_spl_source):
    return parse_spl_definition(gis_spl_source, filename="gis.spl")


@pytest.fixture(scope="session")
def webeiel_resolved(webeiel_spec, gis_definition):
    return resolve(webeiel_spec, gis_definition)


@pytest.fixture(scope="session")
def ecommerce_source() -> str:
    return (FIXTURES / "ecommerce.spl").read_text()


@pytest.fixture(scope="session")
def ecommerce_definition(ecommerce_source):
    return parse_spl_definition(ecommerce_source, filename="ecommerce.spl")
