import pytest

from arrlab.arrangement import canonicalize
from arrlab.generators import boolean, braid, random_arrangement, threelines


def corpus():
    """Named arrangements shared by the property checks."""
    out = {
        "TL": threelines(),
        "B1": boolean(1),
        "B2": boolean(2),
        "B3": boolean(3),
        "A3": braid(3),
        "A4": braid(4),
        "pencil4": canonicalize([(1, 0), (0, 1), (1, 1), (1, -1)], 2),
        "generic43": canonicalize([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)], 3),
        "nonessential": canonicalize([(1, 1, 0), (1, -1, 0)], 3),
    }
    for seed in range(4):
        out[f"random-5-3-{seed}"] = random_arrangement(5, 3, seed)
    return out


CORPUS = corpus()


@pytest.fixture(params=sorted(CORPUS), ids=sorted(CORPUS))
def named(request):
    return request.param, CORPUS[request.param]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
