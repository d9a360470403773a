"""Coin, shift and one-step evolution on the arc space of the complete M-partite graph.

Every routine here mutates the state in place. The coin is a per-vertex
reflection about the loop-weighted equal superposition, negated at marked
vertices; the flip-flop shift swaps ``(v, w)`` with ``(w, v)``. Both run in
O(hilbert_dim) without forming any matrix.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numba
import numpy as np

from .graph import GraphSpec, Vertex, block_start, loop_index, vertex_number


class VertexProbability(NamedTuple):
    total: float
    loop: float
    arcs: float


@numba.njit(cache=True, nogil=True)
def _coin_kernel(psi, n, d, w_arc, w_loop, sign):
    b = d + 1
    for v in range(n):
        o = v * b
        acc = 0j
        for j in range(d):
            acc += psi[o + j]
        proj = w_arc * acc + w_loop * psi[o + d]
        s = sign[v]
        ta = 2.0 * proj * w_arc
        for j in range(d):
            psi[o + j] = s * (ta - psi[o + j])
        psi[o + d] = s * (2.0 * proj * w_loop - psi[o + d])


@numba.njit(cache=True, nogil=True)
def _shift_kernel(psi, N, M):
    # partition pair (p, q), p < q: the N x N tile of arcs p->q is swapped
    # with the transpose of the tile q->p
    b = N * (M - 1) + 1
    for p in range(M):
        for q in range(p + 1, M):
            for i in range(N):
                a0 = (p * N + i) * b + (q - 1) * N
                c0 = q * N * b + p * N + i
                for k in range(N):
                    c = c0 + k * b
                    t = psi[a0 + k]
                    psi[a0 + k] = psi[c]
                    psi[c] = t


def coin_weights(spec: GraphSpec) -> tuple[float, float]:
    """Amplitudes of the reflection axis on an arc slot and on the loop slot."""
    norm = np.sqrt(spec.d + spec.loop_weight)
    return 1.0 / norm, np.sqrt(spec.loop_weight) / norm


def marked_signs(spec: GraphSpec, marked: Iterable[Vertex]) -> np.ndarray:
    sign = np.ones(spec.n)
    for m in marked:
        sign[vertex_number(spec, m)] = -1.0
    return sign


def _check_state(state: np.ndarray, spec: GraphSpec) -> None:
    if state.dtype != np.complex128 or state.shape != (spec.dim,):
        raise ValueError(
            f"state must be complex128 of shape ({spec.dim},), got {state.dtype} {state.shape}"
        )
    if not state.flags.c_contiguous:
        raise ValueError("state must be C-contiguous")


def apply_coin(state: np.ndarray, spec: GraphSpec, marked: Iterable[Vertex] = (),
               signs: np.ndarray | None = None) -> np.ndarray:
    """Grover reflection at every vertex, ``-G`` at the marked ones."""
    _check_state(state, spec)
    if signs is None:
        signs = marked_signs(spec, marked)
    w_arc, w_loop = coin_weights(spec)
    _coin_kernel(state, spec.n, spec.d, w_arc, w_loop, signs)
    return state


def apply_shift(state: np.ndarray, spec: GraphSpec) -> np.ndarray:
    _check_state(state, spec)
    _shift_kernel(state, spec.N, spec.M)
    return state


def step(state: np.ndarray, spec: GraphSpec, marked: Iterable[Vertex] = (),
         signs: np.ndarray | None = None) -> np.ndarray:
    """One step ``U = S C``: coin first, then shift."""
    apply_coin(state, spec, marked, signs)
    _shift_kernel(state, spec.N, spec.M)
    return state


def evolve(state: np.ndarray, spec: GraphSpec, marked: Iterable[Vertex], steps: int,
           observe=None) -> np.ndarray:
    """Apply ``steps`` steps in place; ``observe(t, state)`` is called for t = 0..steps."""
    signs = marked_signs(spec, marked)
    if observe is not None:
        observe(0, state)
    for t in range(1, steps + 1):
        step(state, spec, signs=signs)
        if observe is not None:
            observe(t, state)
    return state


def zero_state(spec: GraphSpec) -> np.ndarray:
    return np.zeros(spec.dim, dtype=np.complex128)


def uniform_state(spec: GraphSpec) -> np.ndarray:
    """Equal superposition of all arcs, loops excluded."""
    psi = np.full((spec.n, spec.block), 1.0 / np.sqrt(spec.n * spec.d), dtype=np.complex128)
    psi[:, spec.d] = 0.0
    return psi.reshape(-1)


def loop_state(spec: GraphSpec, v: Vertex) -> np.ndarray:
    psi = zero_state(spec)
    psi[loop_index(spec, v)] = 1.0
    return psi


def local_uniform_state(spec: GraphSpec, v: Vertex) -> np.ndarray:
    """Equal superposition of the arcs leaving ``v``, loop excluded."""
    psi = zero_state(spec)
    o = block_start(spec, v)
    psi[o:o + spec.d] = 1.0 / np.sqrt(spec.d)
    return psi


def vertex_probability(state: np.ndarray, spec: GraphSpec, v: Vertex) -> VertexProbability:
    o = block_start(spec, v)
    arcs = float(np.vdot(state[o:o + spec.d], state[o:o + spec.d]).real)
    loop = float(abs(state[o + spec.d]) ** 2)
    return VertexProbability(loop + arcs, loop, arcs)


def vertex_probabilities(state: np.ndarray, spec: GraphSpec) -> np.ndarray:
    """Probability of every vertex, in (partition, index) order."""
    blocks = state.reshape(spec.n, spec.block)
    return np.einsum("ij,ij->i", blocks.real, blocks.real) + np.einsum(
        "ij,ij->i", blocks.imag, blocks.imag)
