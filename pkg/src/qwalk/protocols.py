"""Search, state transfer and active-switch transfer runners.

Each runner returns a :class:`RunRecord` holding the probability (or
fidelity) at the vertex of interest for every step ``t = 0..t_max`` split into
its loop and arc parts. ``backend="full"`` evolves the whole arc space;
``backend="reduced"`` evolves coefficients in the exact invariant subspace
and needs a unit loop weight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import engine, spectral
from .graph import GraphSpec, Vertex, check_vertex, loop_index
from .reduced import (SEARCH, STA_DIFF, STA_SAME, build_search_model, build_sta_model)

BACKENDS = ("full", "reduced")
INITS = ("loop", "local-uniform")


@dataclass
class RunRecord:
    scenario: str
    N: int
    M: int
    loop_weight: float
    vertices: dict[str, Vertex]
    backend: str
    t: list[int] = field(default_factory=list)
    total: list[float] = field(default_factory=list)
    loop: list[float] = field(default_factory=list)
    arcs: list[float] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def spec(self) -> GraphSpec:
        return GraphSpec(self.M, self.N, self.loop_weight)

    def append(self, t: int, p: engine.VertexProbability) -> None:
        self.t.append(t)
        self.total.append(p.total)
        self.loop.append(p.loop)
        self.arcs.append(p.arcs)

    def peak(self) -> tuple[int, float]:
        k = int(np.argmax(self.total))
        return self.t[k], self.total[k]

    def first_peak(self) -> tuple[int, float]:
        """First strict local maximum of the total series."""
        v = self.total
        for k in range(1, len(v) - 1):
            if v[k] >= v[k - 1] and v[k] > v[k + 1]:
                return self.t[k], v[k]
        return self.peak()


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")


def _check_steps(t_max: int) -> None:
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")


def _record(scenario, spec, vertices, backend, **meta) -> RunRecord:
    return RunRecord(scenario, spec.N, spec.M, spec.loop_weight, dict(vertices), backend,
                     metadata=dict(meta))


def run_search(spec: GraphSpec, m: Vertex, t_max: int, backend: str = "full") -> RunRecord:
    """Success probability at ``m`` from the uniform start, t = 0..t_max."""
    _check_backend(backend)
    _check_steps(t_max)
    check_vertex(spec, m)
    start = time.perf_counter()
    rec = _record(SEARCH, spec, {"m": m}, backend)
    if backend == "full":
        psi = engine.uniform_state(spec)
        engine.evolve(psi, spec, [m], t_max,
                      lambda t, s: rec.append(t, engine.vertex_probability(s, spec, m)))
    else:
        model = build_search_model(spec, m)
        traj = _trajectory(model.matrix, model.state("uniform"), t_max)
        for t, c in enumerate(traj):
            rec.append(t, model.vertex_probability(c, "m"))
    rec.metadata["wall_time"] = time.perf_counter() - start
    if spec.N >= 2:
        rec.metadata["T_search"] = spectral.search_T(spec)
    return rec


def _trajectory(U: np.ndarray, c0: np.ndarray, steps: int):
    c = np.asarray(c0, dtype=np.complex128)
    yield c
    for _ in range(steps):
        c = U @ c
        yield c


def exact_or_asymptotic(fn):
    """``fn(False)``, or ``fn(True)`` when the exact frequency does not exist (small N)."""
    try:
        return fn(False)
    except ValueError:
        return fn(True)


def transfer_markers(spec: GraphSpec) -> dict[str, float]:
    """Optimal measurement times of both configurations, for the mis-timing diagnostic."""
    return {
        "T_st_same": exact_or_asymptotic(lambda a: spectral.sta_same_first_max(spec, a)[0]),
        "T_st_diff": exact_or_asymptotic(lambda a: spectral.sta_diff_T(spec, a)),
    }


def run_state_transfer(spec: GraphSpec, s: Vertex, r: Vertex, init: str = "loop",
                       t_max: int = 0, backend: str = "full") -> RunRecord:
    """Fidelity at ``r`` under the walk with both ``s`` and ``r`` marked."""
    _check_backend(backend)
    _check_steps(t_max)
    check_vertex(spec, s)
    check_vertex(spec, r)
    if s == r:
        raise ValueError("sender and receiver must differ")
    if init not in INITS:
        raise ValueError(f"init must be one of {INITS}, got {init!r}")
    scenario = STA_SAME if s.partition == r.partition else STA_DIFF
    start = time.perf_counter()
    rec = _record(scenario, spec, {"s": s, "r": r}, backend, init=init)
    if backend == "full":
        psi = (engine.loop_state(spec, s) if init == "loop"
               else engine.local_uniform_state(spec, s))
        engine.evolve(psi, spec, [s, r], t_max,
                      lambda t, st: rec.append(t, engine.vertex_probability(st, spec, r)))
    else:
        model = build_sta_model(spec, s, r)
        for t, c in enumerate(_trajectory(model.matrix, model.state(init, "s"), t_max)):
            rec.append(t, model.vertex_probability(c, "r"))
    rec.metadata["wall_time"] = time.perf_counter() - start
    rec.metadata.update(transfer_markers(spec))
    return rec


def default_switch_time(spec: GraphSpec) -> int:
    """``round(pi / omega2)`` of the single-vertex search (large-graph value if N = 1)."""
    return int(round(exact_or_asymptotic(lambda a: spectral.search_T(spec, a))))


def run_switch_transfer(spec: GraphSpec, s: Vertex, r: Vertex, T: int | None = None,
                        backend: str = "full", allow_same_vertex: bool = False
                        ) -> tuple[RunRecord, float]:
    """Loop at ``s``, ``T`` steps with only ``s`` marked, then ``T`` with only ``r`` marked.

    The series is the probability at ``r`` over all ``2T`` steps; the second
    return value is its final entry.
    """
    _check_backend(backend)
    check_vertex(spec, s)
    check_vertex(spec, r)
    if s == r and not allow_same_vertex:
        raise ValueError("sender and receiver must differ")
    if T is None:
        T = default_switch_time(spec)
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    start = time.perf_counter()
    rec = _record("switch", spec, {"s": s, "r": r}, backend, T=T)
    if backend == "full":
        psi = engine.loop_state(spec, s)
        rec.append(0, engine.vertex_probability(psi, spec, r))
        for phase, marked in ((0, [s]), (T, [r])):
            signs = engine.marked_signs(spec, marked)
            for k in range(1, T + 1):
                engine.step(psi, spec, signs=signs)
                rec.append(phase + k, engine.vertex_probability(psi, spec, r))
    else:
        model = build_sta_model(spec, s, r)
        c = model.state("loop", "s")
        rec.append(0, model.vertex_probability(c, "r"))
        for phase, role in ((0, "s"), (T, "r")):
            U = model.operator((role,))
            for k in range(1, T + 1):
                c = U @ c
                rec.append(phase + k, model.vertex_probability(c, "r"))
    rec.metadata["wall_time"] = time.perf_counter() - start
    return rec, rec.total[-1]


@dataclass(frozen=True)
class SwitchDiagnostics:
    T: int
    alpha_s: complex
    alpha_r: complex
    beta_s: complex
    eps_s: float
    eps_r: float
    delta_s: float
    bound: float
    measured_fidelity: float


def _search_overlaps_full(spec: GraphSpec, m: Vertex, T: int, both: bool):
    omega = engine.uniform_state(spec)
    psi = omega.copy()
    signs = engine.marked_signs(spec, [m])
    for _ in range(T):
        engine.step(psi, spec, signs=signs)
    idx = loop_index(spec, m)
    alpha = complex(psi[idx])
    psi[idx] = 0.0
    eps = float(np.linalg.norm(psi))
    psi[idx] = alpha
    if not both:
        return alpha, eps, None, None
    for _ in range(T):
        engine.step(psi, spec, signs=signs)
    beta = complex(np.vdot(omega, psi))
    psi -= beta * omega
    delta = float(np.linalg.norm(psi))
    return alpha, eps, beta, delta


def _search_overlaps_reduced(model, role: str, T: int):
    U = model.operator((role,))
    omega = model.state("uniform")
    loop = model.state("loop", role)
    c = omega.copy()
    for _ in range(T):
        c = U @ c
    alpha = complex(np.vdot(loop, c))
    eps = float(np.linalg.norm(c - alpha * loop))
    for _ in range(T):
        c = U @ c
    beta = complex(np.vdot(omega, c))
    delta = float(np.linalg.norm(c - beta * omega))
    return alpha, eps, beta, delta


def switch_bound(spec: GraphSpec, s: Vertex, r: Vertex, T: int | None = None,
                 backend: str = "full") -> SwitchDiagnostics:
    """Lower bound on sqrt(fidelity) of the switch protocol from single-vertex search data.

    ``alpha_m`` is the loop amplitude of ``U_m^T |Omega>``, ``eps_m`` the norm of
    the rest; ``beta_s`` is the return amplitude of ``U_s^{2T} |Omega>`` and
    ``delta_s`` the norm of its part orthogonal to ``|Omega>``.
    """
    _check_backend(backend)
    if T is None:
        T = default_switch_time(spec)
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if backend == "full":
        a_s, e_s, b_s, d_s = _search_overlaps_full(spec, s, T, both=True)
        a_r, e_r, _, _ = _search_overlaps_full(spec, r, T, both=False)
    else:
        model = build_sta_model(spec, s, r)
        a_s, e_s, b_s, d_s = _search_overlaps_reduced(model, "s", T)
        a_r, e_r, _, _ = _search_overlaps_reduced(model, "r", T)
    bound = (abs(a_r) * abs(b_s) - d_s - e_s) / abs(a_s)
    _, fid = run_switch_transfer(spec, s, r, T, backend)
    return SwitchDiagnostics(T, a_s, a_r, b_s, e_s, e_r, d_s, bound, fid)
