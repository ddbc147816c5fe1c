"""Application front-ends: entanglement-distance graphs, image threshold
complexes, radius graphs on point clouds, filtration sweeps and a cost model.

Entropies use the natural logarithm throughout, so the qubit distance offset
is ``2 ln 2``.  All thresholds are inclusive.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .cliques import build_simplex_sets
from .graph import Graph
from .rank import RankEstimatorConfig, estimate_betti_from_sets

LN2 = math.log(2.0)
MAX_QUBITS_EXACT = 12


class PipelineError(ValueError):
    pass


# -- quantum states ---------------------------------------------------------


@dataclass(frozen=True)
class DensityMatrix:
    num_subsystems: int
    local_dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dim = math.prod(self.local_dims)
        if len(self.local_dims) != self.num_subsystems:
            raise PipelineError("local_dims must have one entry per subsystem")
        m = self.matrix
        if m.shape != (dim, dim):
            raise PipelineError(f"matrix shape {m.shape} does not match total dimension {dim}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-10:
            raise PipelineError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > 1e-10:
            raise PipelineError(f"density matrix has trace {np.trace(m).real}")
        if dim and np.linalg.eigvalsh(m).min() < -1e-10:
            raise PipelineError("density matrix is not positive semidefinite")

    @classmethod
    def from_pure(cls, psi, local_dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(len(local_dims), tuple(local_dims), np.outer(psi, psi.conj()))


def bell_state() -> DensityMatrix:
    psi = np.zeros(4)
    psi[0] = psi[3] = 1
    return DensityMatrix.from_pure(psi, (2, 2))


def ghz_state(n: int) -> DensityMatrix:
    if n < 1:
        raise PipelineError("GHZ state needs at least one qubit")
    psi = np.zeros(2**n)
    psi[0] = psi[-1] = 1
    return DensityMatrix.from_pure(psi, (2,) * n)


def product_state(n: int) -> DensityMatrix:
    """``|0...0>``."""
    psi = np.zeros(2**n)
    psi[0] = 1
    return DensityMatrix.from_pure(psi, (2,) * n)


def random_pure_state(n: int, seed: int = 0) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return DensityMatrix.from_pure(psi, (2,) * n)


def reduced_density(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Partial trace over every subsystem not in ``keep`` (0-based indices)."""
    keep = sorted(set(int(k) for k in keep))
    n = rho.num_subsystems
    if not keep:
        raise PipelineError("keep must be a nonempty set of subsystems")
    if keep[0] < 0 or keep[-1] >= n:
        raise PipelineError(f"subsystem index out of range for {n} subsystems: {keep}")
    if len(keep) == n:
        return rho
    dims = list(rho.local_dims)
    t = rho.matrix.reshape(dims + dims)
    axes = list(range(n))
    for k in sorted(set(range(n)) - set(keep), reverse=True):
        pos = axes.index(k)
        t = np.trace(t, axis1=pos, axis2=pos + len(axes))
        axes.pop(pos)
    kd = tuple(rho.local_dims[k] for k in keep)
    d = math.prod(kd)
    return DensityMatrix(len(keep), kd, t.reshape(d, d))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def mutual_information_matrix(rho: DensityMatrix) -> np.ndarray:
    """``M_ij = S_i + S_j - S_ij`` with a zero diagonal."""
    if rho.num_subsystems > MAX_QUBITS_EXACT or math.prod(rho.local_dims) > 2**MAX_QUBITS_EXACT:
        raise PipelineError(f"exact diagonalisation refused above {MAX_QUBITS_EXACT} qubits")
    n = rho.num_subsystems
    single = [von_neumann_entropy(reduced_density(rho, [i])) for i in range(n)]
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = single[i] + single[j] - von_neumann_entropy(reduced_density(rho, [i, j]))
    return m


def entanglement_distances(mi: np.ndarray, local_dims: Sequence[int] | None = None) -> np.ndarray:
    """``D_ij = 2 ln 2 - M_ij``, clamped at zero; only defined for qubits."""
    if local_dims is not None and any(d != 2 for d in local_dims):
        raise PipelineError("the 2 ln 2 offset is qubit-specific; non-qubit subsystems are unsupported")
    d = np.maximum(2 * LN2 - np.asarray(mi, dtype=float), 0.0)
    np.fill_diagonal(d, 0.0)
    return d


def triangle_violations(d: np.ndarray, tol: float = 1e-9) -> list[tuple[int, int, int, float]]:
    """Triples with ``D_ij > D_ik + D_kj + tol``, reported rather than raised."""
    n = len(d)
    out = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gap = d[i, j] - d[i, k] - d[k, j]
                if gap > tol:
                    out.append((i, j, k, float(gap)))
    return out


# -- graph sources ------------------------------------------------------------


@dataclass(frozen=True)
class DistanceGraphSpec:
    distances: np.ndarray
    thresholds: tuple[float, ...] = ()

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise PipelineError("distance matrix must be square")
        if not np.allclose(d, d.T, atol=1e-12) or np.any(np.diag(d) != 0) or np.any(d < 0):
            raise PipelineError("distance matrix must be symmetric, nonnegative, zero on the diagonal")
        _check_ascending(self.thresholds)
        object.__setattr__(self, "distances", d)

    def build(self, eps: float):
        g = threshold_graph(self, eps)
        return g, list(range(g.n))


def threshold_graph(dist, eps: float) -> Graph:
    """Edge ``(i, j)`` iff ``D_ij <= eps``."""
    d = dist.distances if isinstance(dist, DistanceGraphSpec) else np.asarray(dist, dtype=float)
    n = len(d)
    iu, ju = np.triu_indices(n, k=1)
    hit = d[iu, ju] <= eps
    return Graph.from_edges(zip(iu[hit].tolist(), ju[hit].tolist()), n=n)


@dataclass(frozen=True)
class ImageGrid:
    intensities: np.ndarray
    connectivity: int = 4

    def __post_init__(self):
        x = np.asarray(self.intensities, dtype=float)
        if x.ndim != 2:
            raise PipelineError("image must be two-dimensional")
        if not np.all(np.isfinite(x)) or x.min(initial=0) < 0 or x.max(initial=0) > 1:
            raise PipelineError("intensities must lie in [0, 1]")
        if self.connectivity not in (4, 8):
            raise PipelineError("connectivity must be 4 or 8")
        object.__setattr__(self, "intensities", x)

    @property
    def side(self) -> int:
        return self.intensities.shape[0]

    def build(self, eps: float):
        return image_threshold_graph(self, eps, self.connectivity), image_vertex_map(self, eps)


def image_vertex_map(img: ImageGrid, eps: float) -> list[tuple[int, int]]:
    """Pixel coordinates of the active vertices, in vertex-id (row-major) order."""
    rows, cols = np.nonzero(img.intensities <= eps)
    return list(zip(rows.tolist(), cols.tolist()))


def image_threshold_graph(img: ImageGrid, eps: float, connectivity: int | None = None) -> Graph:
    """Active pixels ``X_ij <= eps`` joined to their 4-neighbours (optionally 8)."""
    conn = connectivity or img.connectivity
    active = img.intensities <= eps
    ids = -np.ones(active.shape, dtype=np.int64)
    ids[active] = np.arange(int(active.sum()))
    steps = [(0, 1), (1, 0)]
    if conn == 8:
        steps += [(1, 1), (1, -1)]
    h, w = active.shape
    edges = []
    for di, dj in steps:
        # a[i, j] and b[i, j] are the two ends of the step (di, dj)
        a = ids[0 : h - di, max(0, -dj) : w - max(0, dj)]
        b = ids[di:h, max(0, dj) : w - max(0, -dj)]
        ok = (a >= 0) & (b >= 0)
        edges.extend(zip(a[ok].tolist(), b[ok].tolist()))
    return Graph.from_edges(edges, n=int(active.sum()))


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        if not np.all(np.isfinite(p)):
            raise PipelineError("point coordinates must be finite")
        object.__setattr__(self, "points", p)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def uniform(cls, n: int, dim: int = 2, seed: int = 0) -> "PointCloud":
        return cls(np.random.default_rng(seed).random((n, dim)))

    def build(self, radius: float):
        g = rips_graph(self, radius)
        return g, list(range(g.n))


def rips_graph(pc: PointCloud, radius: float) -> Graph:
    """Join points at Euclidean distance ``<= radius``."""
    pts = pc.points
    tree = cKDTree(pts)
    cand = tree.query_pairs(radius * (1 + 1e-9) + 1e-12, output_type="ndarray")
    if len(cand):
        dist = np.linalg.norm(pts[cand[:, 0]] - pts[cand[:, 1]], axis=1)
        cand = cand[dist <= radius]
    return Graph.from_edges(map(tuple, cand.tolist()), n=len(pts))


# -- filtrations --------------------------------------------------------------


def _check_ascending(thresholds: Sequence[float]) -> None:
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise PipelineError(f"thresholds must be ascending: {list(thresholds)}")


@dataclass(frozen=True)
class CurveSample:
    threshold: float
    normalized: float | None
    absolute: float
    size_r: int
    size_r_plus_1: int
    stderr: float


@dataclass(frozen=True)
class BettiCurve:
    r: int
    samples: tuple[CurveSample, ...]
    mode: str = "exact"
    config: RankEstimatorConfig | None = None

    def thresholds(self) -> list[float]:
        return [s.threshold for s in self.samples]

    def absolute(self) -> list[float]:
        return [s.absolute for s in self.samples]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["threshold", "size_r", "size_r_plus_1", "normalized", "absolute", "stderr"])
        for s in self.samples:
            norm = "" if s.normalized is None else repr(s.normalized)
            w.writerow([repr(s.threshold), s.size_r, s.size_r_plus_1, norm, repr(s.absolute), repr(s.stderr)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "mode": self.mode,
            "config": None if self.config is None else self.config.__dict__,
            "samples": [s.__dict__ for s in self.samples],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _labelled(graph: Graph, labels: Sequence[Hashable]):
    verts = set(labels)
    edges = {frozenset((labels[u], labels[v])) for u, v in graph.edges}
    return verts, edges


def filtration_sweep(
    source,
    thresholds: Sequence[float],
    r: int,
    cfg: RankEstimatorConfig | None = None,
    *,
    mode: str = "exact",
    strategy: str = "auto",
) -> BettiCurve:
    """Build the complex at each threshold and estimate ``beta_r / |S_r|``.

    ``source`` is anything with ``build(eps) -> (Graph, labels)`` (the three
    builders above) or a plain callable ``eps -> Graph`` with stable vertex
    ids.  Nestedness of vertex and edge sets between consecutive thresholds
    is checked on the labels.
    """
    thresholds = list(thresholds)
    _check_ascending(thresholds)
    build: Callable = source.build if hasattr(source, "build") else (lambda e: _plain(source, e))
    samples = []
    prev = None
    prev_sizes = None
    for eps in thresholds:
        g, labels = build(eps)
        cur = _labelled(g, labels)
        if prev is not None and not (prev[0] <= cur[0] and prev[1] <= cur[1]):
            raise PipelineError(f"filtration is not nested at threshold {eps}")
        prev = cur
        sets = build_simplex_sets(g, r + 1, strategy)
        sizes = (len(sets[r]), len(sets[r + 1]))
        if prev_sizes is not None and (sizes[0] < prev_sizes[0] or sizes[1] < prev_sizes[1]):
            raise PipelineError(f"simplex counts decreased at threshold {eps}")
        prev_sizes = sizes
        if sizes[0] == 0:
            samples.append(CurveSample(float(eps), None, 0.0, 0, sizes[1], 0.0))
            continue
        est = estimate_betti_from_sets(sets, r, cfg, mode=mode)
        samples.append(CurveSample(float(eps), est.normalized, est.absolute, sizes[0], sizes[1], est.stderr))
    return BettiCurve(r, tuple(samples), mode, cfg)


def _plain(fn, eps):
    g = fn(eps)
    return g, list(range(g.n))


# -- cost model ----------------------------------------------------------------


def cost_model(
    n: int,
    r: int,
    s_r: int,
    e_size: int,
    epsilon: float,
    *,
    s_r_plus_1: int | None = None,
    arboricity: float | None = None,
    degeneracy: float | None = None,
    eta: float = 0.1,
) -> dict:
    """Evaluate the leading-order cost expressions with all constants set to one.

    Returns raw numbers: the LGZ-type cost ``(n^2 sqrt(C(n, r+1) / |S_r|) + n) / eps``,
    the classical enumeration cost ``|E| a^(r-1)`` and/or ``d n 3^(d/3)``, the
    quantum cost ``log(r n) log(r |S_r| |S_r+1|) log(1/eta) / eps^2`` and
    their ratio.  Nothing here is a runtime prediction.
    """
    if s_r <= 0:
        raise PipelineError("|S_r| must be positive")
    if not 0 < epsilon < 1 or not 0 < eta < 1:
        raise PipelineError("epsilon and eta must lie in (0, 1)")
    s_up = s_r if s_r_plus_1 is None else max(s_r_plus_1, 1)
    lgz = (n**2 * math.sqrt(math.comb(n, r + 1) / s_r) + n) / epsilon
    classical = {}
    if arboricity is not None:
        classical["arboricity"] = e_size * arboricity ** (r - 1)
    if degeneracy is not None:
        classical["degeneracy"] = degeneracy * n * 3 ** (degeneracy / 3)
    if not classical:
        classical["arboricity"] = float(e_size)
    rr = max(r, 1)
    quantum = math.log(max(rr * n, 2)) * math.log(max(rr * s_r * s_up, 2)) * math.log(1 / eta) / epsilon**2
    best_classical = min(classical.values())
    hybrid = best_classical + quantum
    return {
        "n": n,
        "r": r,
        "S_r": s_r,
        "S_r_plus_1": s_up,
        "E": e_size,
        "epsilon": epsilon,
        "eta": eta,
        "lgz": lgz,
        "lgz_sparse_bound": (n ** (2 + (r + 1) / 2) + n) / epsilon,
        "hybrid_classical": classical,
        "hybrid_quantum": quantum,
        "hybrid_total": hybrid,
        "ratio_lgz_over_hybrid": lgz / hybrid,
        "log_base": "e",
    }
