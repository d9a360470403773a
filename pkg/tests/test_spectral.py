import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk import spectral as sp
from qwalk.graph import GraphSpec, Vertex
from qwalk.reduced import (SEARCH, STA_DIFF, STA_SAME, build_search_model, build_sta_diff_model,
                           build_sta_same_model)

BIG = GraphSpec(100, 40)
SPECS = [GraphSpec(M, N) for N, M in [(3, 3), (4, 5), (10, 20), (40, 100), (7, 300)]]


def _largest_real_root(coeffs):
    r = np.roots(coeffs)
    r = r[np.abs(r.imag) < 1e-9].real
    return r[(r >= -1) & (r <= 1)].max()


def _eig_cos(matrix):
    return np.linalg.eigvals(matrix).real


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_roots_against_numpy(spec):
    for poly in (sp.search_polynomial, sp.sta_same_polynomial, sp.sta_diff_cubic,
                 sp.sta_diff_quartic):
        c = poly(spec)
        x = sp.largest_root(c)
        assert abs(sp.polyval(c, x)) < 1e-12
        assert abs(x - _largest_real_root(c)) < 1e-9


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_frequencies_are_eigenphases(spec):
    w2 = sp.omega2_search(spec)
    U = build_search_model(spec, Vertex(1, 1)).matrix
    assert np.min(np.abs(_eig_cos(U) - np.cos(w2))) < 1e-10
    if spec.N >= 3:
        model = build_sta_same_model(spec, Vertex(1, 1), Vertex(1, 2))
        w2, w3 = sp.sta_same_frequencies(spec)
        sigma, tau = model.blocks
        assert np.min(np.abs(_eig_cos(sigma.matrix) - np.cos(w2))) < 1e-10
        assert np.min(np.abs(_eig_cos(tau.matrix) - np.cos(w3))) < 1e-10
    model = build_sta_diff_model(spec, Vertex(1, 1), Vertex(2, 1))
    w2, w3 = sp.sta_diff_frequencies(spec)
    sigma, tau = model.blocks
    assert np.min(np.abs(_eig_cos(sigma.matrix) - np.cos(w2))) < 1e-10
    assert np.min(np.abs(_eig_cos(tau.matrix) - np.cos(w3))) < 1e-10


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_frequencies_in_open_interval(spec):
    ws = [sp.omega2_search(spec), *sp.sta_diff_frequencies(spec)]
    if spec.N >= 3:
        ws += list(sp.sta_same_frequencies(spec))
    assert all(0 < w < np.pi for w in ws)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_search_closed_form(spec):
    assert abs(sp.omega2_search(spec) - sp.omega2_search_closed_form(spec)) < 1e-12


def test_search_numbers():
    w = sp.omega2_search(BIG)
    assert w == pytest.approx(0.03169, abs=2e-4)
    assert sp.omega2_search(BIG, asymptotic=True) == pytest.approx(0.031623, abs=1e-6)
    assert abs(w / sp.omega2_search(BIG, True) - 1) < 0.01
    assert sp.search_T(BIG) == pytest.approx(99, abs=1)
    assert sp.search_T(GraphSpec(40, 10), asymptotic=True) == pytest.approx(10 * np.pi)
    spec = GraphSpec(10_000, 10)
    assert abs(sp.omega2_search(spec) * np.sqrt(spec.n) / 2 - 1) < 1e-2
    assert float(sp.search_curve(BIG, 50).total) == pytest.approx(0.508, abs=2e-3)


def test_exact_vs_asymptotic_time_large_graphs():
    for N, M in [(40, 100), (10, 400), (100, 40)]:
        spec = GraphSpec(M, N)
        assert abs(sp.search_T(spec) / sp.search_T(spec, True) - 1) < 0.02


def test_search_curve_special_times():
    assert tuple(map(float, sp.search_curve(BIG, 0))) == (0.0, 0.0, 0.0)
    c = sp.search_curve(BIG, sp.search_T(BIG))
    assert np.allclose([c.total, c.loop, c.arcs], [1, 1, 0], atol=1e-14)


def test_same_partition_numbers():
    w2, w3 = sp.sta_same_frequencies(BIG)
    assert w3 == pytest.approx(np.arccos(1 - 1 / 3961))
    assert w3 == pytest.approx(0.02247, abs=1e-5)
    assert abs(w2 / w3 / np.sqrt(3) - 1) < 0.02
    x = sp.largest_root(sp.sta_same_polynomial(GraphSpec(3, 3)))
    assert -1 <= x <= 1
    T, F1 = sp.sta_same_first_max(BIG, asymptotic=True)
    assert F1 == pytest.approx(0.94, abs=0.005)
    assert T / np.sqrt(BIG.n) == pytest.approx(2.39, abs=0.02)
    Te, Fe = sp.sta_same_first_max(BIG)
    assert abs(Fe / F1 - 1) < 0.01 and abs(Te / T - 1) < 0.01
    f = lambda t: float(sp.sta_same_curve(BIG, t).total)
    assert f(Te) >= f(Te - 1) and f(Te) >= f(Te + 1)
    assert tuple(map(float, sp.sta_same_curve(BIG, 0))) == (0.0, 0.0, 0.0)


def test_mistimed_measurement():
    t = np.pi * np.sqrt(BIG.n / 2)
    assert float(sp.sta_same_curve(BIG, t, asymptotic=True).total) == pytest.approx(0.915, abs=0.01)


def test_diff_partition_numbers():
    w2, w3 = sp.sta_diff_frequencies(BIG)
    assert w3 == pytest.approx(np.arccos(1 - 1 / 4000), abs=2e-4)
    assert abs(w2 / w3 / 2 - 1) < 0.02
    assert sp.sta_diff_T(BIG) == pytest.approx(140, abs=1)
    assert float(sp.sta_diff_curve(BIG, 0).total) == 0.0
    t = np.pi / sp.sta_diff_frequencies(BIG, True)[1]
    assert float(sp.sta_diff_curve(BIG, t, asymptotic=True).total) == pytest.approx(1.0, abs=1e-12)
    assert t == pytest.approx(np.pi * np.sqrt(BIG.n / 2))


def test_convergence_is_monotone():
    N = 10
    gaps = {k: [] for k in range(5)}
    for M in (50, 100, 200, 400, 800):
        spec = GraphSpec(M, N)
        pairs = [(sp.omega2_search(spec), sp.omega2_search(spec, True)),
                 *zip(sp.sta_same_frequencies(spec), sp.sta_same_frequencies(spec, True)),
                 *zip(sp.sta_diff_frequencies(spec), sp.sta_diff_frequencies(spec, True))]
        for k, (a, b) in enumerate(pairs):
            gaps[k].append(abs(a / b - 1))
    for k, g in gaps.items():
        assert all(x > y for x, y in zip(g, g[1:])), (k, g)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 60), st.integers(3, 300), st.floats(0, 5000), st.booleans())
def test_curves_stay_in_unit_interval(N, M, t, asymptotic):
    spec = GraphSpec(M, N)
    for c in (sp.search_curve(spec, t, asymptotic), sp.sta_same_curve(spec, t, asymptotic),
              sp.sta_diff_curve(spec, t, asymptotic)):
        assert -1e-12 <= float(c.total) <= 1 + 1e-12
        assert float(c.loop) >= 0
        assert abs(float(c.total) - float(c.loop) - float(c.arcs)) < 1e-12


def test_spectral_model_dispatch():
    for scen in (SEARCH, STA_SAME, STA_DIFF):
        m = sp.spectral_model(BIG, scen)
        assert m.T_opt > 0
        assert 0 <= float(m.curve(m.T_opt).total) <= 1
    with pytest.raises(ValueError):
        sp.spectral_model(BIG, "nope")


def test_validation():
    with pytest.raises(ValueError):
        sp.omega2_search(GraphSpec(3, 1))
    with pytest.raises(ValueError):
        sp.sta_same_frequencies(GraphSpec(3, 2))
    with pytest.raises(ValueError):
        sp.largest_root([1.0, 0.0, 4.0])


def test_largest_root_simple_cases():
    assert sp.largest_root([1.0, 0.0, -0.25]) == pytest.approx(0.5, abs=1e-14)
    assert sp.largest_root([1.0, -1.0]) == pytest.approx(1.0, abs=1e-14)


def _sector(spec, scenario):
    """Reduced matrix and change-of-basis for the block each named eigenvector lives in."""
    if scenario == SEARCH:
        m = build_search_model(spec, Vertex(1, 1))
        return {"nu": m.matrix}
    m = (build_sta_same_model if scenario == STA_SAME else build_sta_diff_model)(
        spec, Vertex(1, 1), Vertex(1, 2) if scenario == STA_SAME else Vertex(2, 1))
    return {b.name: b.matrix for b in m.blocks}


@pytest.mark.parametrize("scenario", [SEARCH, STA_SAME, STA_DIFF])
def test_asymptotic_eigenvectors_improve_with_size(scenario):
    residuals = []
    for N, M in [(10, 20), (40, 100), (100, 400)]:
        spec = GraphSpec(M, N)
        mats = _sector(spec, scenario)
        worst = 0.0
        for sign in (1, -1):
            for name, (block, v, label) in sp.asymptotic_eigenvectors(scenario, sign).items():
                assert abs(np.linalg.norm(v) - 1) < 1e-12
                U = mats[block]
                lam = np.vdot(v, U @ v)
                worst = max(worst, float(np.linalg.norm(U @ v - lam * v)))
        residuals.append(worst)
    assert residuals[0] > residuals[1] > residuals[2]
