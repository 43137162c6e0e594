import pytest

from logbenford.sieve import PrimeCache


@pytest.fixture(scope="session")
def cache2m():
    return PrimeCache.build(2_000_000)


@pytest.fixture(autouse=True)
def _isolated_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("LOGBENFORD_CACHE_DIR", str(tmp_path / "cache"))


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
