import pytest

from ipir.mds import build_generator
from ipir.protocol import Query, _check_demand
from ipir.rng import set_partition, shuffle


def lowest_demand_first(p, W, S, rng):
    """Deliberately leaky generator: the group holding min(W) always comes first."""
    W, S = _check_demand(p, W, S)
    w_blocks = set_partition(rng, W, p.d)
    s_blocks = set_partition(rng, S, p.m)
    shuffle(rng, s_blocks)
    groups = [sorted(a + b) for a, b in zip(w_blocks, s_blocks)]
    used = set(W) | set(S)
    rest = [i for i in range(1, p.K + 1) if i not in used]
    if rest:
        groups.extend(set_partition(rng, rest, p.T))
    shuffle(rng, groups)
    first = next(k for k, g in enumerate(groups) if W[0] in g)
    groups.insert(0, groups.pop(first))
    return Query(p.K, tuple(tuple(g) for g in groups), build_generator(p.T, p.d, p.q))


@pytest.fixture
def broken_generator():
    return lowest_demand_first


CRITERIA: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        CRITERIA[marker.args[0]] = (marker.args[1], "PASS" if rep.passed else "FAIL")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(CRITERIA, key=lambda c: int(c[1:])):
        title, status = CRITERIA[cid]
        terminalreporter.write_line(f"{status}  {cid}  {title}")
