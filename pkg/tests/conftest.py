import numpy as np
import pytest

from peer_release.instance import PublicWeights, public_view, sample_assignment

GRID5 = (0.0, 0.25, 0.5, 0.75, 1.0)

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def report(label: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        print(_ACCEPTANCE_LINES[-1])

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def worked_example():
    """Three all-zero papers and one paper with weights 1, 2, 3; n = m = 4, l = k = 3."""
    return PublicWeights.from_rows([[0, 0, 0], [0, 0, 0], [0, 0, 0], [1, 2, 3]], 4, 3)


def grid_sampler(values=GRID5):
    values = np.asarray(values)
    return lambda rng, paper, reviewer, slot: float(rng.choice(values))


def random_grid_instance(seed, n, load, values=GRID5):
    """Square instance (m = n, l = k = load) with weights drawn from a small grid."""
    assignment = sample_assignment(n, n, load, load, grid_sampler(values), seed)
    return assignment, public_view(assignment)


def random_mixed_instance(seed, max_n=5, loads=(1, 2), values=GRID5):
    """Instance whose reviewers have loads drawn from ``loads``, using both."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(2, max_n + 1))
        r_loads = rng.choice(loads, size=n).tolist()
        if len(set(r_loads)) == len(loads):
            break
    total = sum(r_loads)
    while True:
        m = int(rng.integers(max(r_loads), total + 1))
        p_loads = np.ones(m, dtype=int)
        for _ in range(total - m):
            p_loads[rng.integers(m)] += 1
        if p_loads.max() <= n:
            break
    assignment = sample_assignment(n, m, r_loads, p_loads.tolist(), grid_sampler(values), seed)
    return assignment, public_view(assignment)
