"""Eigenfrequencies and closed-form probability / fidelity curves.

``cos(omega)`` of each relevant eigenvalue pair is the largest root in
[-1, 1] of a low-degree polynomial whose coefficients depend on ``N`` and
``M``. Every function takes ``asymptotic=True`` to switch to the leading-order
large-graph frequencies instead.

Curve functions accept scalar or array ``t`` and return named tuples of
arrays (or floats).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .graph import GraphSpec
from .reduced import SEARCH, STA_DIFF, STA_SAME


class SearchCurve(NamedTuple):
    total: np.ndarray
    loop: np.ndarray
    arcs: np.ndarray


class DiffCurve(NamedTuple):
    total: np.ndarray
    loop: np.ndarray      # receiver loop
    back: np.ndarray      # arc receiver -> sender
    partition: np.ndarray  # arcs receiver -> rest of the sender's partition
    outside: np.ndarray   # arcs receiver -> other partitions

    @property
    def arcs(self):
        return self.back + self.partition + self.outside


def _check(spec: GraphSpec, min_n: int = 2) -> None:
    if spec.N < min_n:
        raise ValueError(f"need N >= {min_n}, got N={spec.N}")


def polyval(coeffs, x):
    """Horner evaluation, highest degree first."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def largest_root(coeffs, spacing: float = 1e-3, tol: float = 1e-14) -> float:
    """Largest real root in [-1, 1] by sign-change bracketing and bisection."""
    grid = np.linspace(-1.0, 1.0, int(round(2.0 / spacing)) + 1)
    vals = np.array([polyval(coeffs, x) for x in grid])
    for k in range(len(grid) - 1, -1, -1):
        if vals[k] == 0.0:
            return float(grid[k])
        if k > 0 and np.sign(vals[k - 1]) != np.sign(vals[k]) and vals[k - 1] != 0.0:
            lo, hi = grid[k - 1], grid[k]
            flo = vals[k - 1]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = polyval(coeffs, mid)
                if fm == 0.0:
                    return float(mid)
                if np.sign(fm) == np.sign(flo):
                    lo, flo = mid, fm
                else:
                    hi = mid
            return float(0.5 * (lo + hi))
    raise ValueError("no real root in [-1, 1]")


def _arccos(x: float) -> float:
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"arccos argument {x} outside [-1, 1]")
    return float(np.arccos(x))


# characteristic polynomials, coefficients highest degree first

def search_polynomial(spec: GraphSpec) -> list[float]:
    N, D = spec.N, spec.d + 1
    return [1.0, -(1 - N / D), -(D * (N - 2) - (N - 3)) / D**2]


def sta_same_polynomial(spec: GraphSpec) -> list[float]:
    N, D = spec.N, spec.d + 1
    return [1.0, -(1 - N / D), -(D * (N - 3) - (N - 5)) / D**2]


def sta_diff_cubic(spec: GraphSpec) -> list[float]:
    N, M, D = spec.N, spec.M, spec.d + 1
    return [1.0, -(1 - (N + 2) / D), -(D * (N - 1) - N + 5) / D**2, (N * M - 4) / D**2]


def sta_diff_quartic(spec: GraphSpec) -> list[float]:
    N, M, d = spec.N, spec.M, spec.d
    D = d + 1
    return [1.0, (N - 2) / D, -(1 - N * M / D**2), -(N - 2) * (d - 1) / D**2,
            N * (M - 2) / D**2]


def omega2_search(spec: GraphSpec, asymptotic: bool = False) -> float:
    if asymptotic:
        return 2.0 / np.sqrt(spec.n)
    _check(spec)
    return _arccos(largest_root(search_polynomial(spec)))


def omega2_search_closed_form(spec: GraphSpec) -> float:
    N, M = spec.N, spec.M
    disc = N**2 * M**2 - 6 * N * M + 4 * N + 5
    return _arccos(1 - (1 + N * M - np.sqrt(disc)) / (2 * (spec.d + 1)))


def search_T(spec: GraphSpec, asymptotic: bool = False) -> float:
    """Steps to the first success maximum, pi / omega2."""
    return np.pi / omega2_search(spec, asymptotic)


def search_curve(spec: GraphSpec, t, asymptotic: bool = False) -> SearchCurve:
    x = omega2_search(spec, asymptotic) * np.asarray(t, dtype=float)
    return SearchCurve(np.sin(x / 2) ** 2, np.sin(x / 2) ** 4, 0.25 * np.sin(x) ** 2)


def sta_same_frequencies(spec: GraphSpec, asymptotic: bool = False) -> tuple[float, float]:
    if asymptotic:
        return np.sqrt(6.0 / spec.n), np.sqrt(2.0 / spec.n)
    _check(spec, 3)
    omega2 = _arccos(largest_root(sta_same_polynomial(spec)))
    omega3 = _arccos(1 - 1 / (spec.d + 1))
    return omega2, omega3


def sta_same_curve_from(omega2: float, omega3: float, t) -> SearchCurve:
    t = np.asarray(t, dtype=float)
    a, b = omega2 * t, omega3 * t
    loop = (2 + np.cos(a) - 3 * np.cos(b)) ** 2 / 36
    arcs = (np.sin(a) - np.sqrt(3) * np.sin(b)) ** 2 / 24
    return SearchCurve(loop + arcs, loop, arcs)


def sta_same_curve(spec: GraphSpec, t, asymptotic: bool = False) -> SearchCurve:
    return sta_same_curve_from(*sta_same_frequencies(spec, asymptotic), t)


def first_maximum(f: Callable[[float], float], t_end: float, samples: int = 4000
                  ) -> tuple[float, float]:
    """First interior local maximum of ``f`` on (0, t_end): grid scan, then golden section."""
    ts = np.linspace(0.0, t_end, samples + 1)
    vals = np.array([f(t) for t in ts])
    for k in range(1, samples):
        if vals[k] >= vals[k - 1] and vals[k] > vals[k + 1]:
            res = minimize_scalar(lambda t: -f(t), bracket=(ts[k - 1], ts[k], ts[k + 1]),
                                  method="golden", tol=1e-12)
            return float(res.x), float(-res.fun)
    raise ValueError("no interior maximum found")


def sta_same_first_max(spec: GraphSpec, asymptotic: bool = False) -> tuple[float, float]:
    """Time and value of the first fidelity maximum, same-partition transfer."""
    omega2, omega3 = sta_same_frequencies(spec, asymptotic)
    return first_maximum(lambda t: float(sta_same_curve_from(omega2, omega3, t).total),
                         2 * np.pi / omega3)


def sta_diff_frequencies(spec: GraphSpec, asymptotic: bool = False) -> tuple[float, float]:
    if asymptotic:
        return 2 * np.sqrt(2.0 / spec.n), np.sqrt(2.0 / spec.n)
    _check(spec)
    omega2 = _arccos(largest_root(sta_diff_cubic(spec)))
    omega3 = _arccos(largest_root(sta_diff_quartic(spec)))
    return omega2, omega3


def sta_diff_curve_from(omega2: float, omega3: float, t) -> DiffCurve:
    t = np.asarray(t, dtype=float)
    a, b = omega2 * t, omega3 * t
    loop = (3 + np.cos(a) - 4 * np.cos(b)) ** 2 / 64
    back = np.sin(a / 2) ** 4 / 16
    partition = np.zeros_like(a)
    outside = (np.sin(a) - 2 * np.sin(b)) ** 2 / 32
    return DiffCurve(loop + back + partition + outside, loop, back, partition, outside)


def sta_diff_curve(spec: GraphSpec, t, asymptotic: bool = False) -> DiffCurve:
    return sta_diff_curve_from(*sta_diff_frequencies(spec, asymptotic), t)


def sta_diff_harmonic(spec: GraphSpec, t, asymptotic: bool = False):
    """``sin^4(omega3 t / 2)``, the large-graph limit of the fidelity."""
    omega3 = sta_diff_frequencies(spec, asymptotic)[1]
    return np.sin(omega3 * np.asarray(t, dtype=float) / 2) ** 4


def sta_diff_T(spec: GraphSpec, asymptotic: bool = False) -> float:
    return np.pi / sta_diff_frequencies(spec, asymptotic)[1]


@dataclass(frozen=True)
class SpectralModel:
    scenario: str
    omega2: float
    omega3: float | None
    T_opt: float
    curve: Callable


def spectral_model(spec: GraphSpec, scenario: str, asymptotic: bool = False) -> SpectralModel:
    if scenario == SEARCH:
        w2 = omega2_search(spec, asymptotic)
        return SpectralModel(scenario, w2, None, np.pi / w2,
                             lambda t: search_curve(spec, t, asymptotic))
    if scenario == STA_SAME:
        w2, w3 = sta_same_frequencies(spec, asymptotic)
        T, _ = sta_same_first_max(spec, asymptotic)
        return SpectralModel(scenario, w2, w3, T, lambda t: sta_same_curve_from(w2, w3, t))
    if scenario == STA_DIFF:
        w2, w3 = sta_diff_frequencies(spec, asymptotic)
        return SpectralModel(scenario, w2, w3, np.pi / w3,
                             lambda t: sta_diff_curve_from(w2, w3, t))
    raise ValueError(f"unknown scenario {scenario!r}")


def _vec(size: int, entries: dict[int, complex]) -> np.ndarray:
    v = np.zeros(size, dtype=np.complex128)
    for i, c in entries.items():
        v[i - 1] = c
    return v


def asymptotic_eigenvectors(scenario: str, sign: int = 1) -> dict[str, tuple[str, np.ndarray, str]]:
    """Large-graph eigenvectors that carry the dynamics.

    Returns ``name -> (block, coefficients, eigenvalue label)``. Block is
    ``"nu"`` (search class basis), ``"sigma"`` or ``"tau"``; the label is
    ``"1"`` or ``"+omega2"``/``"-omega2"``/... for the phase ``exp(i*label)``.
    ``sign`` picks the (+) or (-) member of each conjugate pair.
    """
    s3, s2, s6 = np.sqrt(3), np.sqrt(2), np.sqrt(6)
    i = 1j * sign
    tag = "+" if sign > 0 else "-"
    if scenario == SEARCH:
        return {
            "psi1": ("nu", _vec(8, {7: 1 / s2, 1: -1 / s2}), "1"),
            "psi2": ("nu", _vec(8, {1: 0.5, 7: 0.5, 5: i / 2, 2: -i / 2}), tag + "omega2"),
        }
    if scenario == STA_SAME:
        return {
            "psi1": ("sigma", _vec(8, {1: np.sqrt(2 / 3), 7: -1 / s3}), "1"),
            "psi2": ("sigma", _vec(8, {1: 1 / s6, 7: 1 / s3, 5: i / 2, 2: -i / 2}),
                     tag + "omega2"),
            "psi3": ("tau", _vec(3, {1: 1 / s2, 2: i / 2, 3: -i / 2}), tag + "omega3"),
        }
    if scenario == STA_DIFF:
        return {
            "psi1": ("sigma", _vec(12, {1: s3 / 2, 2: -1 / (2 * s3), 11: -1 / s6}), "1"),
            "psi2": ("sigma", _vec(12, {1: 1 / np.sqrt(8), 2: 1 / np.sqrt(8), 9: i / 2,
                                        4: -i / 2, 11: 0.5}), tag + "omega2"),
            "psi3": ("tau", _vec(10, {1: 1 / s2, 9: i / 2, 4: -i / 2}), tag + "omega3"),
        }
    raise ValueError(f"unknown scenario {scenario!r}")
