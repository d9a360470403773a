"""Exact invariant subspaces of the search and state-transfer walks.

Every basis vector of these subspaces is the normalized indicator of a class
of arcs, where the class of an arc depends only on the *categories* of its two
endpoints (the distinguished vertex itself, the rest of its partition, the
rest of the graph, ...). A model therefore stores a category per vertex and a
class lookup table instead of dense basis vectors; full-space vectors are only
built on request.

The reduced matrices come from closed-form coefficient tables in ``d, N, M``.
For the state-transfer scenarios the tables are written in the symmetric and
antisymmetric combinations under the sender/receiver exchange and rotated back
to the class basis. The full-space step is used only by :func:`check_closure`
and :func:`projected_matrix`, which serve as independent checks of the tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import engine
from .engine import VertexProbability
from .graph import GraphSpec, Vertex, check_vertex, slot_targets, vertex_number

SEARCH = "search-1-marked"
STA_SAME = "sta-same-partition"
STA_DIFF = "sta-diff-partition"
SCENARIOS = (SEARCH, STA_SAME, STA_DIFF)


class InfeasibleModel(ValueError):
    """The requested reduced model does not exist for these parameters."""


@dataclass(frozen=True)
class SymmetryBlock:
    name: str
    change: np.ndarray  # rows: block basis vectors in class-basis coordinates
    matrix: np.ndarray


@dataclass(frozen=True)
class ReducedModel:
    scenario: str
    spec: GraphSpec
    roles: dict[str, Vertex]
    counts: np.ndarray
    is_loop: np.ndarray
    owner: tuple[str | None, ...]
    matrix: np.ndarray
    blocks: tuple[SymmetryBlock, ...] = ()
    parity: np.ndarray | None = None
    _categories: np.ndarray = field(default=None, repr=False)
    _arc_table: np.ndarray = field(default=None, repr=False)
    _loop_table: np.ndarray = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.counts)

    @property
    def marked(self) -> tuple[Vertex, ...]:
        return tuple(self.roles.values())

    @cached_property
    def labels(self) -> np.ndarray:
        """Class id of every arc (full-space length)."""
        spec = self.spec
        lab = np.full((spec.n, spec.block), -1, dtype=np.int16)
        cat = self._categories
        for p in range(1, spec.M + 1):
            rows = slice((p - 1) * spec.N, p * spec.N)
            tgt = slot_targets(spec, p)
            lab[rows, :spec.d] = self._arc_table[cat[rows][:, None], cat[tgt][None, :]]
            lab[rows, spec.d] = self._loop_table[cat[rows]]
        lab = lab.reshape(-1)
        if (lab < 0).any():
            raise AssertionError("arc without a class")
        return lab

    @cached_property
    def class_order(self) -> tuple[np.ndarray, np.ndarray]:
        """Arc ids grouped by class, and the group boundaries."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.searchsorted(self.labels[order], np.arange(self.size + 1))
        return order, bounds

    def basis_vector(self, i: int) -> np.ndarray:
        psi = engine.zero_state(self.spec)
        psi[self.labels == i] = 1.0 / np.sqrt(self.counts[i])
        return psi

    def basis(self) -> list[np.ndarray]:
        return [self.basis_vector(i) for i in range(self.size)]

    def lift(self, coeffs: np.ndarray) -> np.ndarray:
        """Full-space vector with the given class-basis coefficients."""
        scale = np.asarray(coeffs, dtype=np.complex128) / np.sqrt(self.counts)
        return scale[self.labels]

    def operator(self, marked: tuple[str, ...] | None = None) -> np.ndarray:
        """Reduced matrix with only the named roles carrying the marked coin.

        Unmarking a role flips the sign of its coin, i.e. multiplies from the
        right by -1 on the classes that live in that vertex's block.
        """
        if marked is None:
            return self.matrix
        unknown = set(marked) - set(self.roles)
        if unknown:
            raise ValueError(f"unknown roles {sorted(unknown)}")
        flip = np.array([-1.0 if o is not None and o not in marked else 1.0
                         for o in self.owner])
        return self.matrix * flip[None, :]

    def state(self, kind: str, role: str | None = None) -> np.ndarray:
        """Class-basis coefficients of ``uniform``, ``loop`` or ``local-uniform``."""
        spec = self.spec
        c = np.zeros(self.size, dtype=np.complex128)
        if kind == "uniform":
            arcs = ~self.is_loop
            c[arcs] = np.sqrt(self.counts[arcs] / (spec.n * spec.d))
            return c
        if role not in self.roles:
            raise ValueError(f"role {role!r} not in {sorted(self.roles)}")
        own = np.array([o == role for o in self.owner])
        if kind == "loop":
            c[own & self.is_loop] = 1.0
        elif kind == "local-uniform":
            sel = own & ~self.is_loop
            c[sel] = np.sqrt(self.counts[sel] / spec.d)
        else:
            raise ValueError(f"unknown state kind {kind!r}")
        return c

    def vertex_probability(self, coeffs: np.ndarray, role: str) -> VertexProbability:
        own = np.array([o == role for o in self.owner])
        w = np.abs(coeffs) ** 2
        loop = float(w[own & self.is_loop].sum())
        arcs = float(w[own & ~self.is_loop].sum())
        return VertexProbability(loop + arcs, loop, arcs)


def _sqrt(x):
    return np.sqrt(max(x, 0.0))


def _table(size: int, columns: dict[int, dict[int, float]], denom: float) -> np.ndarray:
    """Matrix from ``{column: {row: numerator}}``, 1-based, all over ``denom``."""
    m = np.zeros((size, size))
    for j, col in columns.items():
        for i, val in col.items():
            m[i - 1, j - 1] = val / denom
    return m


def _categorize(spec: GraphSpec, rules) -> np.ndarray:
    cat = np.empty(spec.n, dtype=np.intp)
    for num in range(spec.n):
        cat[num] = rules(num // spec.N + 1, num)
    return cat


def _lookup(n_cat: int, loops: dict[int, int], arcs: dict[tuple[int, int], int]):
    arc_table = np.full((n_cat, n_cat), -1, dtype=np.int16)
    for (a, b), k in arcs.items():
        arc_table[a, b] = k
    loop_table = np.full(n_cat, -1, dtype=np.int16)
    for a, k in loops.items():
        loop_table[a] = k
    return arc_table, loop_table


def _require_unit_loop(spec: GraphSpec) -> None:
    if spec.loop_weight != 1:
        raise InfeasibleModel(
            f"reduced models need loop weight 1, got {spec.loop_weight}")


def build_search_model(spec: GraphSpec, m: Vertex) -> ReducedModel:
    """8-dimensional subspace of the search with one marked vertex."""
    _require_unit_loop(spec)
    if spec.N < 2:
        raise InfeasibleModel("search model needs N >= 2")
    check_vertex(spec, m)
    N, M, d = spec.N, spec.M, spec.d
    D = d + 1
    mnum = vertex_number(spec, m)

    cat = _categorize(spec, lambda p, num: 0 if num == mnum else (1 if p == m.partition else 2))
    arc_table, loop_table = _lookup(
        3, {0: 0, 1: 2, 2: 7}, {(0, 2): 1, (1, 2): 3, (2, 0): 4, (2, 1): 5, (2, 2): 6})

    r = _sqrt
    U = _table(8, {
        1: {1: d - 1, 5: -2 * r(d)},
        2: {1: -2 * r(d), 5: -(d - 1)},
        3: {3: 1 - d, 6: 2 * r(d)},
        4: {3: 2 * r(d), 6: d - 1},
        5: {2: 1 - d, 4: 2 * r(N - 1), 7: 2 * r(d - N), 8: 2},
        6: {2: 2 * r(N - 1), 4: -(d + 3 - 2 * N), 7: 2 * r((d - N) * (N - 1)), 8: 2 * r(N - 1)},
        7: {2: 2 * r(d - N), 4: 2 * r((d - N) * (N - 1)), 7: d - 1 - 2 * N, 8: 2 * r(d - N)},
        8: {2: 2, 4: 2 * r(N - 1), 7: 2 * r(d - N), 8: 1 - d},
    }, D)
    counts = np.array([1, d, N - 1, d * (N - 1), d, d * (N - 1), d * (d - N), d], dtype=float)
    is_loop = np.zeros(8, dtype=bool)
    is_loop[[0, 2, 7]] = True
    owner = ("m", "m") + (None,) * 6
    return ReducedModel(SEARCH, spec, {"m": m}, counts, is_loop, owner, U,
                        _categories=cat, _arc_table=arc_table, _loop_table=loop_table)


def _pair_change(size: int, sym: list[tuple[int, ...]], anti: list[tuple[int, int]]):
    """Rows: (nu_a + nu_b)/sqrt2 or single nu_a, then (nu_a - nu_b)/sqrt2; 1-based."""
    rows = []
    for pair in sym:
        row = np.zeros(size)
        row[[i - 1 for i in pair]] = 1.0 / np.sqrt(len(pair))
        rows.append(row)
    for a, b in anti:
        row = np.zeros(size)
        row[a - 1], row[b - 1] = 1.0 / np.sqrt(2), -1.0 / np.sqrt(2)
        rows.append(row)
    return np.array(rows)


def _permutation(size: int, swaps: list[tuple[int, int]]) -> np.ndarray:
    perm = np.eye(size)
    for a, b in swaps:
        perm[[a - 1, b - 1]] = perm[[b - 1, a - 1]]
    return perm


def _check_pair(spec: GraphSpec, s: Vertex, r: Vertex) -> None:
    check_vertex(spec, s)
    check_vertex(spec, r)
    if s == r:
        raise ValueError("sender and receiver must differ")


def build_sta_same_model(spec: GraphSpec, s: Vertex, r: Vertex) -> ReducedModel:
    """11-dimensional subspace of the transfer walk, sender and receiver in one partition."""
    _check_pair(spec, s, r)
    if s.partition != r.partition:
        raise ValueError("sender and receiver are in different partitions")
    _require_unit_loop(spec)
    if spec.N < 3:
        raise InfeasibleModel("same-partition model needs N >= 3")
    N, d = spec.N, spec.d
    D = d + 1
    snum, rnum = vertex_number(spec, s), vertex_number(spec, r)

    def rules(p, num):
        if num == snum:
            return 0
        if num == rnum:
            return 1
        return 2 if p == s.partition else 3

    cat = _categorize(spec, rules)
    arc_table, loop_table = _lookup(
        4, {0: 0, 1: 2, 2: 4, 3: 10},
        {(0, 3): 1, (1, 3): 3, (2, 3): 5, (3, 0): 6, (3, 1): 7, (3, 2): 8, (3, 3): 9})

    q = _sqrt
    sigma = _table(8, {
        1: {1: d - 1, 5: -2 * q(d)},
        2: {1: -2 * q(d), 5: -(d - 1)},
        3: {3: 1 - d, 6: 2 * q(d)},
        4: {3: 2 * q(d), 6: d - 1},
        5: {2: 3 - d, 4: 2 * q(2 * (N - 2)), 7: 2 * q(2 * (d - N)), 8: 2 * q(2)},
        6: {2: 2 * q(2 * (N - 2)), 4: -(d - 2 * N + 5), 7: 2 * q((d - N) * (N - 2)),
            8: 2 * q(N - 2)},
        7: {2: 2 * q(2 * (d - N)), 4: 2 * q((d - N) * (N - 2)), 7: d - 2 * N - 1,
            8: 2 * q(d - N)},
        8: {2: 2 * q(2), 4: 2 * q(N - 2), 7: 2 * q(d - N), 8: -(d - 1)},
    }, D)
    tau = _table(3, {
        1: {1: d - 1, 3: -2 * q(d)},
        2: {1: -2 * q(d), 3: -(d - 1)},
        3: {2: -D},
    }, D)
    change = _pair_change(11, [(1, 3), (2, 4), (5,), (6,), (7, 8), (9,), (10,), (11,)],
                          [(1, 3), (2, 4), (7, 8)])
    U = change.T @ _block_diag(sigma, tau) @ change
    counts = np.array([1, d, 1, d, N - 2, d * (N - 2), d, d, d * (N - 2), d * (d - N), d],
                      dtype=float)
    is_loop = np.zeros(11, dtype=bool)
    is_loop[[0, 2, 4, 10]] = True
    owner = ("s", "s", "r", "r") + (None,) * 7
    blocks = (SymmetryBlock("sigma", change[:8], sigma), SymmetryBlock("tau", change[8:], tau))
    parity = _permutation(11, [(1, 3), (2, 4), (7, 8)])
    return ReducedModel(STA_SAME, spec, {"s": s, "r": r}, counts, is_loop, owner, U,
                        blocks, parity, cat, arc_table, loop_table)


def build_sta_diff_model(spec: GraphSpec, s: Vertex, r: Vertex) -> ReducedModel:
    """22-dimensional subspace (21 when M = 3), sender and receiver in different partitions."""
    _check_pair(spec, s, r)
    if s.partition == r.partition:
        raise ValueError("sender and receiver are in the same partition")
    _require_unit_loop(spec)
    if spec.N < 2:
        raise InfeasibleModel("different-partition model needs N >= 2")
    N, M, d = spec.N, spec.M, spec.d
    D = d + 1
    snum, rnum = vertex_number(spec, s), vertex_number(spec, r)

    def rules(p, num):
        if num == snum:
            return 0
        if num == rnum:
            return 1
        if p == s.partition:
            return 2
        return 3 if p == r.partition else 4

    cat = _categorize(spec, rules)
    arc_table, loop_table = _lookup(
        5, {0: 0, 1: 4, 2: 8, 3: 12, 4: 21},
        {(0, 1): 1, (0, 3): 2, (0, 4): 3,
         (1, 0): 5, (1, 2): 6, (1, 4): 7,
         (2, 1): 9, (2, 3): 10, (2, 4): 11,
         (3, 0): 13, (3, 2): 14, (3, 4): 15,
         (4, 0): 16, (4, 1): 17, (4, 2): 18, (4, 3): 19, (4, 4): 20})

    q = _sqrt
    a, b = q(N - 1), q(d - N)
    ab = q((d - N) * (N - 1))
    sigma = _table(12, {
        1: {1: d - 1, 2: -2, 6: -2 * a, 9: -2 * b},
        2: {1: -2, 2: d - 1, 6: -2 * a, 9: -2 * b},
        3: {1: -2 * a, 2: -2 * a, 6: d - 2 * N + 3, 9: -2 * ab},
        4: {1: -2 * b, 2: -2 * b, 6: -2 * ab, 9: -(d - 2 * N - 1)},
        5: {3: 2, 5: -(d - 1), 7: 2 * a, 10: 2 * b},
        6: {3: -(d - 1), 5: 2, 7: 2 * a, 10: 2 * b},
        7: {3: 2 * a, 5: 2 * a, 7: -(d - 2 * N + 3), 10: 2 * ab},
        8: {3: 2 * b, 5: 2 * b, 7: 2 * ab, 10: d - 2 * N - 1},
        9: {4: -(d - 3), 8: 4 * a, 11: 2 * q(2 * N * (M - 3)), 12: 2 * q(2)},
        10: {4: 4 * a, 8: -(d - 4 * N + 5), 11: 2 * q(2 * N * (N - 1) * (M - 3)),
             12: 2 * q(2 * (N - 1))},
        11: {4: 2 * q(2 * N * (M - 3)), 8: 2 * q(2 * N * (N - 1) * (M - 3)), 11: d - 4 * N - 1,
             12: 2 * q(N * (M - 3))},
        12: {4: 2 * q(2), 8: 2 * q(2 * (N - 1)), 11: 2 * q(N * (M - 3)), 12: -(d - 1)},
    }, D)
    tau = _table(10, {
        1: {1: d - 1, 2: 2, 6: 2 * a, 9: -2 * b},
        2: {1: -2, 2: -(d - 1), 6: 2 * a, 9: -2 * b},
        3: {1: -2 * a, 2: 2 * a, 6: -(d - 2 * N + 3), 9: -2 * ab},
        4: {1: -2 * b, 2: 2 * b, 6: 2 * ab, 9: -(d - 2 * N - 1)},
        5: {3: -2, 5: -(d - 1), 7: -2 * a, 10: 2 * b},
        6: {3: d - 1, 5: 2, 7: -2 * a, 10: 2 * b},
        7: {3: -2 * a, 5: 2 * a, 7: d - 2 * N + 3, 10: 2 * ab},
        8: {3: -2 * b, 5: 2 * b, 7: -2 * ab, 10: d - 2 * N - 1},
        9: {4: -D},
        10: {8: -D},
    }, D)
    pairs = [(1, 5), (2, 6), (3, 7), (4, 8), (9, 13), (10, 14), (11, 15), (12, 16),
             (17, 18), (19, 20)]
    change = _pair_change(22, pairs + [(21,), (22,)], pairs)
    U = change.T @ _block_diag(sigma, tau) @ change
    counts = np.array([1, 1, N - 1, d - N, 1, 1, N - 1, d - N,
                       N - 1, N - 1, (N - 1) ** 2, (d - N) * (N - 1),
                       N - 1, N - 1, (N - 1) ** 2, (d - N) * (N - 1),
                       d - N, d - N, (d - N) * (N - 1), (d - N) * (N - 1),
                       N * (d - N) * (M - 3), d - N], dtype=float)
    is_loop = np.zeros(22, dtype=bool)
    is_loop[[0, 4, 8, 12, 21]] = True
    owner = ("s",) * 4 + ("r",) * 4 + (None,) * 14
    parity = _permutation(22, pairs)
    sig_change, tau_change = change[:12], change[12:]

    if M == 3:
        # no arcs between two partitions outside the sender's and receiver's
        keep = np.ones(22, dtype=bool)
        keep[20] = False
        sig_keep = np.ones(12, dtype=bool)
        sig_keep[10] = False
        U = U[np.ix_(keep, keep)]
        sigma = sigma[np.ix_(sig_keep, sig_keep)]
        sig_change = sig_change[sig_keep][:, keep]
        tau_change = tau_change[:, keep]
        counts, is_loop = counts[keep], is_loop[keep]
        owner = tuple(o for o, k in zip(owner, keep) if k)
        parity = parity[np.ix_(keep, keep)]
        loop_table = np.where(loop_table > 20, loop_table - 1, loop_table).astype(np.int16)
        arc_table = arc_table.copy()
        arc_table[4, 4] = -1

    blocks = (SymmetryBlock("sigma", sig_change, sigma), SymmetryBlock("tau", tau_change, tau))
    return ReducedModel(STA_DIFF, spec, {"s": s, "r": r}, counts, is_loop, owner, U,
                        blocks, parity, cat, arc_table, loop_table)


def _block_diag(*mats: np.ndarray) -> np.ndarray:
    size = sum(m.shape[0] for m in mats)
    out = np.zeros((size, size))
    o = 0
    for m in mats:
        k = m.shape[0]
        out[o:o + k, o:o + k] = m
        o += k
    return out


def build_sta_model(spec: GraphSpec, s: Vertex, r: Vertex) -> ReducedModel:
    if s.partition == r.partition:
        return build_sta_same_model(spec, s, r)
    return build_sta_diff_model(spec, s, r)


def project(state: np.ndarray, model: ReducedModel) -> tuple[np.ndarray, float]:
    """Class-basis coefficients of ``state`` and the norm of what is left over."""
    if state.shape != (model.spec.dim,):
        raise ValueError(f"state has shape {state.shape}, model needs ({model.spec.dim},)")
    order, bounds = model.class_order
    # per-class slices summed with numpy's pairwise summation (bincount sums
    # sequentially and loses ~1e-13 on large classes)
    sums = np.array([state[order[a:b]].sum() for a, b in zip(bounds[:-1], bounds[1:])])
    coeffs = sums / np.sqrt(model.counts)
    residual = float(np.linalg.norm(state - model.lift(coeffs)))
    return coeffs, residual


def check_closure(model: ReducedModel, spec: GraphSpec | None = None,
                  basis: list[np.ndarray] | None = None) -> float:
    """Largest ``|| U nu_j - sum_i M_ij nu_i ||`` over the basis, with a full-space step.

    ``spec`` overrides the graph used for the full-space step (for example a
    different loop weight); ``basis`` overrides the basis vectors.
    """
    spec = spec or model.spec
    if basis is None:
        basis = model.basis()
    B = np.array(basis).T
    worst = 0.0
    for j, nu in enumerate(basis):
        out = engine.step(nu.astype(np.complex128, copy=True), spec, model.marked)
        worst = max(worst, float(np.linalg.norm(out - B @ model.matrix[:, j])))
    return worst


def projected_matrix(model: ReducedModel) -> np.ndarray:
    """``<nu_i|U|nu_j>`` computed with the full-space step."""
    out = np.empty((model.size, model.size), dtype=np.complex128)
    for j in range(model.size):
        img = engine.step(model.basis_vector(j), model.spec, model.marked)
        out[:, j] = project(img, model)[0]
    return out


def evolve_coefficients(model: ReducedModel, coeffs: np.ndarray, steps: int,
                        marked: tuple[str, ...] | None = None) -> np.ndarray:
    """Coefficient trajectory, shape ``(steps + 1, size)``."""
    U = model.operator(marked)
    traj = np.empty((steps + 1, model.size), dtype=np.complex128)
    traj[0] = coeffs
    for t in range(steps):
        traj[t + 1] = U @ traj[t]
    return traj
