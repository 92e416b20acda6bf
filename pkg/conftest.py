import pytest

from qtop.config import get_settings
from qtop.services.links import knot_table
from qtop.services.qcore import QParams


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default settings, regardless of a local .env."""
    monkeypatch.setenv("QTOP_THREADS", "1")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def p3():
    return QParams(r=3)


@pytest.fixture
def p5():
    return QParams(r=5)


@pytest.fixture(params=[3, 5], ids=lambda r: f"r{r}")
def params(request):
    return QParams(r=request.param)


@pytest.fixture
def unknot():
    return knot_table("unknot")


@pytest.fixture
def trefoil():
    return knot_table("trefoil")


@pytest.fixture
def figure8():
    return knot_table("figure8")


@pytest.fixture
def hopf():
    return knot_table("hopf")
