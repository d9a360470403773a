"""Parameter sweeps, scaling fits, result files and figure reproduction.

Sweeps run one independent simulation per ``(N, M)`` point in a thread pool
(``QWALK_THREADS`` overrides its size) and use the reduced backend whenever
the reduced model exists for that point. Results are written as CSV
(``t,total,loop,arcs`` for curves, ``N,M,metric`` for sweeps) or JSON.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spectral, svg
from .graph import GraphSpec, Vertex
from .protocols import (RunRecord, default_switch_time, run_search, run_state_transfer,
                        run_switch_transfer)
from .reduced import SEARCH, STA_DIFF, STA_SAME, InfeasibleModel

SWITCH = "switch"
SCENARIOS = (SEARCH, STA_SAME, STA_DIFF, SWITCH)
DEFAULT_N = (10, 50, 100)
DEFAULT_M = (25, 50, 100, 200, 400)
CONFIGS = ("same", "diff")


def default_vertices(config: str = "same") -> tuple[Vertex, Vertex]:
    """Sender and receiver used unless told otherwise."""
    if config not in CONFIGS:
        raise ValueError(f"config must be one of {CONFIGS}, got {config!r}")
    return Vertex(1, 1), (Vertex(1, 2) if config == "same" else Vertex(2, 1))


def random_vertices(spec: GraphSpec, config: str, seed: int) -> tuple[Vertex, Vertex]:
    """Random sender/receiver placement of the requested configuration."""
    if config not in CONFIGS:
        raise ValueError(f"config must be one of {CONFIGS}, got {config!r}")
    rng = np.random.default_rng(seed)
    s = Vertex(int(rng.integers(1, spec.M + 1)), int(rng.integers(1, spec.N + 1)))
    if config == "same":
        if spec.N < 2:
            raise ValueError("same-partition placement needs N >= 2")
        idx = [i for i in range(1, spec.N + 1) if i != s.index]
        return s, Vertex(s.partition, int(rng.choice(idx)))
    parts = [p for p in range(1, spec.M + 1) if p != s.partition]
    return s, Vertex(int(rng.choice(parts)), int(rng.integers(1, spec.N + 1)))


# ---------------------------------------------------------------- fitting

def fit_loglog_slope(points) -> tuple[float, float, float]:
    """Least squares line through ``(ln x, ln y)``.

    Returns ``(slope, intercept, rms residual)``; needs at least two distinct
    positive abscissae and positive ordinates.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("need at least two points to fit a slope")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("log-log fit needs positive x and y")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    if np.ptp(lx) == 0:
        raise ValueError("all x values are equal, slope is undetermined")
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    rms = float(np.sqrt(np.mean((A @ [slope, intercept] - ly) ** 2)))
    return float(slope), float(intercept), rms


# ---------------------------------------------------------------- sweeps

@dataclass
class SweepResult:
    scenario: str
    config: str
    points: list[tuple[int, int, float]]   # (N, M, metric)
    slope: float
    intercept: float
    rms: float
    series_slopes: dict[int, float] = field(default_factory=dict)
    backends: list[str] = field(default_factory=list)

    @property
    def axis(self) -> list[tuple[int, int]]:
        return [(N, M) for N, M, _ in self.points]

    @property
    def metrics(self) -> list[float]:
        return [m for _, _, m in self.points]


def _pool_size() -> int:
    env = os.environ.get("QWALK_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"QWALK_THREADS must be >= 1, got {env}")
        return n
    return os.cpu_count() or 1


def same_partition_peak() -> tuple[float, float]:
    """Large-graph first fidelity maximum of same-partition transfer, ``(t/sqrt(NM), F1)``."""
    t, f1 = spectral.sta_same_first_max(GraphSpec(3, 1), asymptotic=True)
    return t / np.sqrt(3.0), f1


def sweep_point(scenario: str, N: int, M: int, backend: str = "auto",
                config: str = "same", loop_weight: float = 1.0) -> tuple[float, str]:
    """Gap metric at the scenario's optimal time; returns ``(metric, backend used)``.

    * search: ``1 - P_m(T)`` with ``T = round(pi / omega2)``
    * same-partition transfer: ``F1 - F(T)`` with the large-graph first
      maximum ``F1`` and ``T = round(t1 * sqrt(NM))``
    * different-partition transfer: ``1 - F(T)`` with ``T = round(pi / omega3)``
    * switch: ``1 - F(2T)`` with the default switch time
    """
    spec = GraphSpec(M, N, loop_weight)
    order = ("reduced", "full") if backend == "auto" else (backend,)
    for k, b in enumerate(order):
        try:
            return _metric(scenario, spec, b, config), b
        except InfeasibleModel:
            if k == len(order) - 1:
                raise
    raise AssertionError("unreachable")


def _metric(scenario: str, spec: GraphSpec, backend: str, config: str) -> float:
    if scenario == SEARCH:
        T = int(round(spectral.search_T(spec)))
        return 1.0 - run_search(spec, Vertex(1, 1), T, backend).total[-1]
    if scenario == STA_SAME:
        s, r = default_vertices("same")
        t1, f1 = same_partition_peak()
        T = int(round(t1 * np.sqrt(spec.n)))
        return f1 - run_state_transfer(spec, s, r, "loop", T, backend).total[-1]
    if scenario == STA_DIFF:
        s, r = default_vertices("diff")
        T = int(round(spectral.sta_diff_T(spec)))
        return 1.0 - run_state_transfer(spec, s, r, "loop", T, backend).total[-1]
    if scenario == SWITCH:
        s, r = default_vertices(config)
        return 1.0 - run_switch_transfer(spec, s, r, default_switch_time(spec), backend)[1]
    raise ValueError(f"unknown scenario {scenario!r}")


def sweep(scenario: str, N_list=DEFAULT_N, M_list=DEFAULT_M, backend: str = "auto",
          config: str = "same", threads: int | None = None) -> SweepResult:
    """Run every ``(N, M)`` point and fit one log-log slope through all of them.

    Per-``N`` slopes are reported alongside in ``series_slopes`` (when a
    series has at least two points).
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    if backend not in ("auto", "full", "reduced"):
        raise ValueError(f"unknown backend {backend!r}")
    Ms = sorted(set(int(m) for m in M_list))
    Ns = [int(n) for n in N_list]
    axis = [(N, M) for N in Ns for M in Ms]
    if not axis:
        raise ValueError("empty sweep axis")
    for N, M in axis:
        GraphSpec(M, N)   # validate up front

    def work(p):
        return sweep_point(scenario, p[0], p[1], backend, config)

    with ThreadPoolExecutor(max_workers=threads or _pool_size()) as pool:
        results = list(pool.map(work, axis))
    points = [(N, M, float(m)) for (N, M), (m, _) in zip(axis, results)]
    slope, intercept, rms = fit_loglog_slope([(M, m) for _, M, m in points])
    per_n = {}
    for N in Ns:
        sub = [(M, m) for n, M, m in points if n == N]
        if len(sub) >= 2:
            per_n[N] = fit_loglog_slope(sub)[0]
    return SweepResult(scenario, config, points, slope, intercept, rms, per_n,
                       [b for _, b in results])


def reference_band(result: SweepResult, M_min: int = 50) -> tuple[float, list[bool]]:
    """Check points against ``c/M`` and ``c/M^2`` lines anchored at the first M >= M_min.

    Both lines pass through the geometric mean ``g`` of the metrics at the
    anchor ``M0``; a point at ``M > M0`` is inside the band when
    ``g (M0/M)^2 <= metric <= g (M0/M)``. Returns ``(g, inside flags)`` for
    the points with ``M > M0``.
    """
    Ms = sorted({M for _, M, _ in result.points if M >= M_min})
    if not Ms:
        raise ValueError(f"no points with M >= {M_min}")
    M0 = Ms[0]
    g = float(np.exp(np.mean([np.log(m) for _, M, m in result.points if M == M0])))
    flags = [g * (M0 / M) ** 2 <= m <= g * (M0 / M)
             for _, M, m in result.points if M > M0]
    return g, flags


# ---------------------------------------------------------------- files

def _g(x: float) -> str:
    return "%.12g" % x


def record_to_csv(rec: RunRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "total", "loop", "arcs"])
    for row in zip(rec.t, rec.total, rec.loop, rec.arcs):
        w.writerow([row[0], _g(row[1]), _g(row[2]), _g(row[3])])
    return buf.getvalue()


def curve_to_csv(t, total, loop, arcs) -> str:
    rec = RunRecord("curve", 0, 0, 1.0, {}, "analytic", list(map(int, t)),
                    list(map(float, total)), list(map(float, loop)), list(map(float, arcs)))
    return record_to_csv(rec)


def read_curve_csv(text: str) -> dict[str, list]:
    """Columns of a curve CSV: ``t`` as ints, the rest as floats."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["t", "total", "loop", "arcs"]:
        raise ValueError("not a curve CSV (expected header t,total,loop,arcs)")
    cols = {k: [] for k in rows[0]}
    for row in rows[1:]:
        cols["t"].append(int(row[0]))
        for k, v in zip(("total", "loop", "arcs"), row[1:]):
            cols[k].append(float(v))
    return cols


def sweep_to_csv(res: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "M", "metric"])
    for N, M, m in res.points:
        w.writerow([N, M, _g(m)])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[tuple[int, int, float]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["N", "M", "metric"]:
        raise ValueError("not a sweep CSV (expected header N,M,metric)")
    return [(int(a), int(b), float(c)) for a, b, c in rows[1:]]


def _plain(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def record_to_json(rec: RunRecord) -> str:
    obj = {
        "kind": "run",
        "scenario": rec.scenario, "N": rec.N, "M": rec.M, "loop_weight": rec.loop_weight,
        "vertices": {k: [v.partition, v.index] for k, v in rec.vertices.items()},
        "backend": rec.backend,
        "t": rec.t, "total": rec.total, "loop": rec.loop, "arcs": rec.arcs,
        "metadata": {k: _plain(v) for k, v in rec.metadata.items()},
    }
    return json.dumps(obj, indent=1) + "\n"


def record_from_json(text: str) -> RunRecord:
    obj = json.loads(text)
    if obj.get("kind") != "run":
        raise ValueError("not a run record")
    return RunRecord(obj["scenario"], obj["N"], obj["M"], obj["loop_weight"],
                     {k: Vertex(*v) for k, v in obj["vertices"].items()}, obj["backend"],
                     obj["t"], obj["total"], obj["loop"], obj["arcs"], obj["metadata"])


def sweep_to_json(res: SweepResult) -> str:
    obj = {
        "kind": "sweep", "scenario": res.scenario, "config": res.config,
        "points": [list(p) for p in res.points],
        "slope": res.slope, "intercept": res.intercept, "rms": res.rms,
        "series_slopes": {str(k): v for k, v in res.series_slopes.items()},
        "backends": res.backends,
    }
    return json.dumps(obj, indent=1) + "\n"


def sweep_from_json(text: str) -> SweepResult:
    obj = json.loads(text)
    if obj.get("kind") != "sweep":
        raise ValueError("not a sweep result")
    return SweepResult(obj["scenario"], obj["config"],
                       [(int(a), int(b), float(c)) for a, b, c in obj["points"]],
                       obj["slope"], obj["intercept"], obj["rms"],
                       {int(k): v for k, v in obj["series_slopes"].items()}, obj["backends"])


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------- plots

def curve_plot(rec: RunRecord, overlay=None, title: str = "", ylabel: str = "probability"
               ) -> svg.Plot:
    """Simulated total/loop/arc series as points, analytic ``overlay`` (t, total, loop) as lines."""
    p = svg.Plot(title=title, xlabel="t", ylabel=ylabel)
    p.add("total", rec.t, rec.total, color="#222222")
    p.add("loop", rec.t, rec.loop, color="#1f5fbf")
    p.add("arcs", rec.t, rec.arcs, color="#2e8b57")
    if overlay is not None:
        t, total, loop = overlay
        p.add("analytic total", list(t), list(total), style="line", color="#c03030")
        p.add("analytic loop", list(t), list(loop), style="line", color="#c03030", dashed=True)
    return p


def sweep_plot(res: SweepResult, title: str = "", slopes=(1,)) -> svg.Plot:
    p = svg.Plot(title=title, xlabel="M", ylabel="gap", logx=True, logy=True)
    for N in sorted({n for n, _, _ in res.points}):
        sub = [(M, m) for n, M, m in res.points if n == N]
        p.add(f"N={N}", [a for a, _ in sub], [b for _, b in sub])
    Ms = sorted({M for _, M, _ in res.points})
    M0 = Ms[0]
    g = float(np.exp(np.mean([np.log(m) for _, M, m in res.points if M == M0])))
    for k in slopes:
        p.add(f"1/M^{k}" if k != 1 else "1/M", Ms, [g * (M0 / M) ** k for M in Ms],
              style="line", color="#c03030", dashed=k != 1)
    return p


# ---------------------------------------------------------------- figures

FIGURES = {
    1: "search success probability, N=40, M=100",
    2: "search scaling 1-P(T)",
    3: "same-partition transfer from the equal-weight state, 1000 steps",
    4: "same-partition transfer from the loop, N=40, M=100",
    5: "same-partition scaling F1-F(T)",
    6: "different-partition transfer from the loop, N=40, M=100",
    7: "different-partition scaling 1-F(T)",
    8: "switch protocol vs plain transfer, same partition",
    9: "switch scaling 1-F(2T)",
}


@dataclass
class FigureResult:
    number: int
    files: list[str]
    checks: dict[str, float]


def figure(n: int, out_dir=".", backend: str = "full", N_list=DEFAULT_N, M_list=DEFAULT_M
           ) -> FigureResult:
    """Regenerate the data (CSV) and a plot (SVG) of figure ``n``.

    ``backend`` applies to the single-run figures; sweeps pick the reduced
    model when it exists. ``checks`` holds the summary numbers each figure
    is meant to show.
    """
    if n not in FIGURES:
        raise ValueError(f"figure number must be in 1..9, got {n}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []
    checks: dict[str, float] = {}
    big = GraphSpec(100, 40)

    def save(name, text):
        path = out / name
        _write(path, text)
        files.append(str(path))

    def save_curve(rec, overlay, title, ylabel="probability"):
        save(f"fig{n}.csv", record_to_csv(rec))
        if overlay is not None:
            t, total, loop, arcs = overlay
            save(f"fig{n}_analytic.csv", curve_to_csv(t, total, loop, arcs))
            overlay = (t, total, loop)
        save(f"fig{n}.svg", svg.render(curve_plot(rec, overlay, title, ylabel)))

    def save_sweep(res, title, slopes):
        save(f"fig{n}.csv", sweep_to_csv(res))
        save(f"fig{n}.svg", svg.render(sweep_plot(res, title, slopes)))
        checks["slope"] = res.slope
        checks["rms"] = res.rms
        for N, s in res.series_slopes.items():
            checks[f"slope_N{N}"] = s

    if n == 1:
        rec = run_search(big, Vertex(1, 1), 150, backend)
        c = spectral.search_curve(big, rec.t)
        save_curve(rec, (rec.t, c.total, c.loop, c.arcs), FIGURES[1])
        t, p = rec.peak()
        checks.update(peak=p, peak_t=t, sup_norm=float(np.max(np.abs(np.subtract(rec.total, c.total)))))
    elif n == 2:
        save_sweep(sweep(SEARCH, N_list, M_list), FIGURES[2], (1,))
    elif n == 3:
        s, r = default_vertices("same")
        rec = run_state_transfer(big, s, r, "local-uniform", 1000, backend)
        save_curve(rec, None, FIGURES[3], "fidelity")
        checks["max_fidelity"] = max(rec.total)
    elif n == 4:
        s, r = default_vertices("same")
        rec = run_state_transfer(big, s, r, "loop", 300, backend)
        c = spectral.sta_same_curve(big, rec.t)
        save_curve(rec, (rec.t, c.total, c.loop, c.arcs), FIGURES[4], "fidelity")
        t, f = rec.first_peak()
        checks.update(first_max=f, first_max_t=t)
    elif n == 5:
        save_sweep(sweep(STA_SAME, N_list, M_list), FIGURES[5], (1,))
    elif n == 6:
        s, r = default_vertices("diff")
        rec = run_state_transfer(big, s, r, "loop", 300, backend)
        c = spectral.sta_diff_curve(big, rec.t)
        save_curve(rec, (rec.t, c.total, c.loop, c.arcs), FIGURES[6], "fidelity")
        checks.update(F_140=rec.total[140], sup_norm_harmonic=float(np.max(np.abs(
            np.subtract(rec.total[:171], spectral.sta_diff_harmonic(big, rec.t[:171]))))))
    elif n == 7:
        save_sweep(sweep(STA_DIFF, N_list, M_list), FIGURES[7], (1, 2))
    elif n == 8:
        s, r = default_vertices("same")
        T = default_switch_time(big)
        rec, fid = run_switch_transfer(big, s, r, T, backend)
        c = spectral.sta_same_curve(big, rec.t)
        save_curve(rec, (rec.t, c.total, c.loop, c.arcs), FIGURES[8], "fidelity")
        checks.update(switch_fidelity=fid, T=T, plain_first_max=spectral.sta_same_first_max(big)[1])
    elif n == 9:
        res = sweep(SWITCH, N_list, M_list)
        save_sweep(res, FIGURES[9], (1, 2))
        _, flags = reference_band(res)
        checks["inside_band"] = float(sum(flags))
        checks["band_points"] = float(len(flags))
    return FigureResult(n, files, checks)
