import pytest

from hereditary_advice.graph_core import INDEPENDENT_SET, TRIANGLE_FREE, Graph, ramsey_like_graph
from hereditary_advice.reductions import AntiFixture, build_g_n_sigma


@pytest.fixture(scope="session")
def base16():
    """Verified 16-vertex base graph for K_2 with threshold 8."""
    cert = ramsey_like_graph(16, Graph.complete(2), 2, seed=0)
    assert cert.verified
    return cert


@pytest.fixture(scope="session")
def layered16():
    lay = build_g_n_sigma(16, 4, Graph.complete(2), 1.5, 1.0, seed=0)
    assert lay.verified
    return lay


@pytest.fixture(scope="session")
def anti12():
    gt = ramsey_like_graph(12, Graph.complete(2), 1.5, seed=0)
    assert gt.verified
    return AntiFixture(Graph.complete(2), gt, INDEPENDENT_SET)


@pytest.fixture(scope="session")
def anti_triangle():
    gt = ramsey_like_graph(8, Graph.complete(3), 2, seed=0, budget=2000)
    assert gt.verified
    return AntiFixture(Graph.complete(3), gt, TRIANGLE_FREE)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, _, line in sorted(RESULTS):
            terminalreporter.write_line(line)
