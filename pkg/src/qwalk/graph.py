"""Complete M-partite graph with loops and its arc-indexed Hilbert space.

Vertices are labelled ``(partition, index)`` with 1-based numbering. The
state space has one basis state per directed arc ``(v, w)`` between vertices
of different partitions plus one loop state ``(v, v)`` per vertex.

Layout is vertex-major: vertex ``v`` owns the contiguous block
``[blockstart(v), blockstart(v) + d]``. Inside a block the ``d`` outgoing arcs
are ordered by target ``(partition, index)`` skipping the own partition, and
the loop sits in the last slot. State vectors are plain ``complex128`` numpy
arrays of length :func:`hilbert_dim`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class GraphSpec:
    M: int
    N: int
    loop_weight: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 3:
            raise ValueError(f"M must be an integer >= 3, got {self.M}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N}")
        if not self.loop_weight >= 0:
            raise ValueError(f"loop_weight must be >= 0, got {self.loop_weight}")

    @property
    def n(self) -> int:
        """Number of vertices."""
        return self.N * self.M

    @property
    def d(self) -> int:
        """Vertex degree (loops not counted)."""
        return self.N * (self.M - 1)

    @property
    def block(self) -> int:
        """Slots per vertex: d arcs plus the loop."""
        return self.d + 1

    @property
    def dim(self) -> int:
        return self.n * self.block


@dataclass(frozen=True, order=True)
class Vertex:
    partition: int
    index: int

    def __str__(self):
        return f"({self.partition},{self.index})"


def hilbert_dim(spec: GraphSpec) -> int:
    return spec.N * spec.M * (spec.N * (spec.M - 1) + 1)


def check_vertex(spec: GraphSpec, v: Vertex) -> None:
    if not (1 <= v.partition <= spec.M and 1 <= v.index <= spec.N):
        raise ValueError(f"vertex {v} outside graph with M={spec.M}, N={spec.N}")


def vertex_number(spec: GraphSpec, v: Vertex) -> int:
    """0-based position of ``v`` in (partition, index) order."""
    check_vertex(spec, v)
    return (v.partition - 1) * spec.N + (v.index - 1)


def vertex_at(spec: GraphSpec, number: int) -> Vertex:
    if not 0 <= number < spec.n:
        raise ValueError(f"vertex number {number} out of range [0, {spec.n})")
    return Vertex(number // spec.N + 1, number % spec.N + 1)


def vertices(spec: GraphSpec) -> Iterator[Vertex]:
    for p in range(1, spec.M + 1):
        for i in range(1, spec.N + 1):
            yield Vertex(p, i)


def block_start(spec: GraphSpec, v: Vertex) -> int:
    return vertex_number(spec, v) * spec.block


def loop_index(spec: GraphSpec, v: Vertex) -> int:
    return block_start(spec, v) + spec.d


def _slot(spec: GraphSpec, v: Vertex, w: Vertex) -> int:
    q = w.partition if w.partition < v.partition else w.partition - 1
    return (q - 1) * spec.N + (w.index - 1)


def arc_index(spec: GraphSpec, v: Vertex, w: Vertex) -> int:
    check_vertex(spec, w)
    if v == w:
        return loop_index(spec, v)
    if v.partition == w.partition:
        raise ValueError(f"no edge between {v} and {w}: same partition")
    return block_start(spec, v) + _slot(spec, v, w)


def arc_endpoints(spec: GraphSpec, idx: int) -> tuple[Vertex, Vertex]:
    if not 0 <= idx < spec.dim:
        raise ValueError(f"arc id {idx} out of range [0, {spec.dim})")
    vnum, slot = divmod(idx, spec.block)
    v = vertex_at(spec, vnum)
    if slot == spec.d:
        return v, v
    q, k = divmod(slot, spec.N)
    q += 1
    if q >= v.partition:
        q += 1
    return v, Vertex(q, k + 1)


def slot_targets(spec: GraphSpec, partition: int) -> np.ndarray:
    """0-based target vertex numbers of the d arc slots of any vertex in ``partition``."""
    N, M = spec.N, spec.M
    others = [q for q in range(M) if q != partition - 1]
    return (np.asarray(others)[:, None] * N + np.arange(N)[None, :]).ravel()
