"""Independent dense oracles shared by the test modules.

The dense walk operator is assembled entry by entry from the textbook
definitions (flip-flop shift, Grover reflection about the loop-weighted local
superposition, sign flip at marked vertices) over an explicitly enumerated
list of arcs. Only ``arc_index`` is borrowed from the package, and it is
itself checked exhaustively in ``test_graph.py``.
"""

import itertools

import numpy as np
import pytest

from qwalk.graph import GraphSpec, Vertex, arc_index


def enumerate_arcs(spec):
    vs = [Vertex(p, i) for p in range(1, spec.M + 1) for i in range(1, spec.N + 1)]
    arcs = [(v, w) for v, w in itertools.product(vs, vs)
            if v == w or v.partition != w.partition]
    return vs, arcs


def dense_shift(spec):
    _, arcs = enumerate_arcs(spec)
    S = np.zeros((spec.dim, spec.dim))
    for v, w in arcs:
        S[arc_index(spec, w, v), arc_index(spec, v, w)] = 1.0
    return S


def dense_coin(spec, marked=()):
    vs, _ = enumerate_arcs(spec)
    l = spec.loop_weight
    C = np.zeros((spec.dim, spec.dim))
    for v in vs:
        out = [w for w in vs if w.partition != v.partition]
        idx = [arc_index(spec, v, w) for w in out] + [arc_index(spec, v, v)]
        omega = np.array([1.0] * len(out) + [np.sqrt(l)]) / np.sqrt(len(out) + l)
        G = 2 * np.outer(omega, omega) - np.eye(len(idx))
        if v in marked:
            G = -G
        C[np.ix_(idx, idx)] = G
    return C


def dense_unitary(spec, marked=()):
    return dense_shift(spec) @ dense_coin(spec, marked)


def random_state(spec, rng):
    psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


SMALL_SPECS = [GraphSpec(3, 2), GraphSpec(3, 3), GraphSpec(4, 2)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
