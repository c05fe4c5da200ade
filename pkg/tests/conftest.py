import pytest

from igact.config.config import Config, RunConfig
from igact.modules.group import make_cyclic
from igact.modules.pipeline import Pipeline


@pytest.fixture(autouse=True)
def no_log_file(monkeypatch):
    monkeypatch.setattr(Config, "LOG_FILE", "")


def _pipeline(group: str, rank: int = 3, **overrides) -> Pipeline:
    return Pipeline(RunConfig(group=group, rank=rank, **overrides))


@pytest.fixture(scope="session")
def z2() -> Pipeline:
    return _pipeline("cyclic:2")


@pytest.fixture(scope="session")
def z3() -> Pipeline:
    return _pipeline("cyclic:3")


@pytest.fixture(scope="session")
def s3() -> Pipeline:
    return _pipeline("sym:3")


@pytest.fixture(scope="session")
def z2_rank2() -> Pipeline:
    return _pipeline("cyclic:2", rank=2)


@pytest.fixture
def cyclic2():
    return make_cyclic(2)
