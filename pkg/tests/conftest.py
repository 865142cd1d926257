import pytest

from ldpcount.graph import gen_erdos_renyi

_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Collect one PASS/FAIL line per acceptance criterion."""

    def _record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        assert ok, f"{name}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_graphs():
    """Random graphs with N <= 8 for brute-force comparisons."""
    out = []
    for s in range(50):
        n = 3 + s % 6
        out.append(gen_erdos_renyi(n, 0.3 + 0.1 * (s % 5), seed=1000 + s))
    return out
