"""Stochastic kernel-fraction estimation and normalised Betti numbers.

The kernel fraction ``dim ker(A) / dim`` of a normalised PSD operator ``A``
(spectrum in ``[0, 1]``) is ``trace(h(A)) / dim`` for the step ``h`` that is
1 at zero and 0 on the nonzero spectrum.  We approximate ``h`` by a
Jackson-damped Chebyshev expansion of a step with its edge between
``threshold * rho`` and ``threshold``, and estimate the trace with
Rademacher probes (Hutchinson).  Only matrix-vector products with ``A`` are
used.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Literal

import numpy as np

from .chain import GramOperator, boundary_matrix, gram_operator
from .cliques import Strategy, build_simplex_sets
from .graph import Graph

Mode = Literal["stochastic", "exact"]

TRANSITION_FRACTION = 0.25
EXACT_EIG_TOL = 1e-8
GAP_DIAGNOSTIC_MAX_DIM = 2000
_BLOCK = 512


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class RankEstimatorConfig:
    epsilon: float = 0.05
    eta: float = 0.1
    threshold: float | None = None
    degree: int | None = None
    probes: int | None = None
    seed: int = 0
    rho: float = TRANSITION_FRACTION

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise EstimationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.eta < 1:
            raise EstimationError(f"eta must lie in (0, 1), got {self.eta}")
        if self.threshold is not None and not 0 < self.threshold < 1:
            raise EstimationError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.degree is not None and self.degree < 1:
            raise EstimationError(f"degree must be >= 1, got {self.degree}")
        if self.probes is not None and self.probes < 1:
            raise EstimationError(f"probes must be >= 1, got {self.probes}")
        if not 0 < self.rho < 1:
            raise EstimationError(f"rho must lie in (0, 1), got {self.rho}")

    def resolved(self, normalization: int) -> "RankEstimatorConfig":
        """Fill unset fields with the defaults for an operator normalised by ``normalization``."""
        theta = self.threshold if self.threshold is not None else default_threshold(normalization)
        degree = self.degree if self.degree is not None else default_degree(theta, self.epsilon)
        probes = self.probes if self.probes is not None else plan_probes(self.epsilon, self.eta)
        return replace(self, threshold=theta, degree=degree, probes=probes)


def default_threshold(normalization: int) -> float:
    """Half the normalised unit eigenvalue: ``1 / (2 (r+1) |S_r|)``."""
    return 1.0 / (2.0 * max(normalization, 1))


def default_degree(threshold: float, epsilon: float) -> int:
    return math.ceil(4.0 / math.sqrt(threshold) * math.log(8.0 / epsilon))


def plan_probes(epsilon: float, eta: float) -> int:
    """Hoeffding-style repetition count ``ceil(ln(2/eta) / (2 eps^2))``."""
    if not 0 < epsilon < 1:
        raise EstimationError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < eta < 1:
        raise EstimationError(f"eta must lie in (0, 1), got {eta}")
    return math.ceil(math.log(2.0 / eta) / (2.0 * epsilon**2))


def plan_probes_multiplicative(delta: float, eta: float, s_r_size: int, beta_prior: float) -> int:
    """Repetitions for relative accuracy ``delta`` on beta_r, given a lower bound ``beta_prior``."""
    if beta_prior <= 0:
        raise EstimationError("beta_prior must be positive; relative accuracy on zero is undefined")
    if s_r_size <= 0:
        raise EstimationError("s_r_size must be positive")
    return plan_probes(delta * beta_prior / s_r_size, eta)


# -- polynomial filter ------------------------------------------------------


def _angle(x: float) -> float:
    return math.acos(min(1.0, max(-1.0, 2.0 * x - 1.0)))


def jackson_weights(degree: int) -> np.ndarray:
    n = degree + 1
    k = np.arange(n)
    a = math.pi / (n + 1)
    return ((n - k + 1) * np.cos(a * k) + np.sin(a * k) / math.tan(a)) / (n + 1)


def step_coefficients(threshold: float, degree: int, rho: float = TRANSITION_FRACTION) -> np.ndarray:
    """Damped Chebyshev coefficients (in ``t = 2x - 1``) of the step that is 1 below the edge,
    rescaled so the polynomial equals 1 at zero.

    The edge sits halfway, in Chebyshev angle, between ``threshold * rho``
    and ``threshold``.
    """
    phi_c = 0.5 * (_angle(threshold * rho) + _angle(threshold))
    k = np.arange(1, degree + 1)
    c = np.empty(degree + 1)
    c[0] = (math.pi - phi_c) / math.pi
    c[1:] = -2.0 / math.pi * np.sin(k * phi_c) / k
    c *= jackson_weights(degree)
    # pin h(0) = 1 exactly; T_k(-1) = (-1)^k
    return c / np.sum(c * (-1.0) ** np.arange(degree + 1))


def filter_values(x, coeffs: np.ndarray) -> np.ndarray:
    """Evaluate the filter polynomial at points ``x`` in ``[0, 1]``."""
    return np.polynomial.chebyshev.chebval(2.0 * np.asarray(x, dtype=float) - 1.0, coeffs)


def is_under_resolved(threshold: float, degree: int, rho: float = TRANSITION_FRACTION) -> bool:
    """Heuristic: the Jackson kernel (angular width ~ pi/degree) must fit in the half-gap of the edge."""
    half_gap = 0.5 * (_angle(threshold * rho) - _angle(threshold))
    return (degree + 1) * half_gap < 2.5 * math.pi


def apply_filter(matvec, coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``h(A) z`` by the three-term recurrence on ``B = 2A - I``."""
    t_prev = z
    acc = coeffs[0] * z
    if len(coeffs) == 1:
        return acc
    t_cur = 2.0 * matvec(z) - z
    acc = acc + coeffs[1] * t_cur
    for c in coeffs[2:]:
        t_next = 2.0 * (2.0 * matvec(t_cur) - t_cur) - t_prev
        acc = acc + c * t_next
        t_prev, t_cur = t_cur, t_next
    return acc


# -- probes -----------------------------------------------------------------


def rademacher_probe(seed: int, stream: int, index: int, dim: int) -> np.ndarray:
    """Probe ``index`` of ``stream``; depends only on (seed, stream, index) so any partition reproduces it."""
    rng = np.random.default_rng([seed, stream, index])
    return rng.integers(0, 2, size=dim).astype(float) * 2.0 - 1.0


def hutchinson_samples(
    matvec, coeffs, dim: int, probes: int, seed: int, stream: int = 0, workers: int | None = None
) -> np.ndarray:
    """Per-probe quadratic forms ``z_i^T h(A) z_i`` in probe-index order."""

    def run(lo, hi):
        z = np.stack([rademacher_probe(seed, stream, i, dim) for i in range(lo, hi)], axis=1)
        y = apply_filter(matvec, coeffs, z)
        return np.einsum("ij,ij->j", z, y)

    bounds = [(lo, min(lo + _BLOCK, probes)) for lo in range(0, probes, _BLOCK)]
    if workers and workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: run(*b), bounds))
    else:
        parts = [run(*b) for b in bounds]
    return np.concatenate(parts) if parts else np.zeros(0)


class DenseOperator:
    """A symmetric PSD matrix already scaled into ``[0, 1]``, for tests and generic use."""

    def __init__(self, matrix, normalization: float = 1.0):
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise EstimationError(f"expected a square matrix, got shape {self.matrix.shape}")
        self.normalization = normalization
        self.normalized = self.matrix / normalization

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def matvec(self, x):
        return self.normalized @ x

    def spectral_norm_bound(self) -> float:
        return float(np.linalg.norm(self.normalized, 2)) if self.dim else 0.0


@dataclass(frozen=True)
class KernelFractionEstimate:
    value: float
    stderr: float
    probes_used: int
    config: RankEstimatorConfig
    dim: int
    raw: float = 0.0
    mode: str = "stochastic"
    under_resolved: bool = False
    smallest_nonzero_eigenvalue: float | None = None
    gap_below_threshold: bool | None = None

    @property
    def rank_fraction(self) -> float:
        return 1.0 - self.value


def _gap_diagnostic(op, threshold: float):
    if op.dim == 0 or op.dim > GAP_DIAGNOSTIC_MAX_DIM:
        return None, None
    w = np.linalg.eigvalsh(op.matrix)
    nz = w[w > EXACT_EIG_TOL]
    if nz.size == 0:
        return None, None
    lam = float(nz.min()) / op.normalization
    return lam, lam < threshold


def exact_kernel_fraction(op) -> float:
    """Kernel fraction by eigendecomposition (eigenvalues below 1e-8 count as zero)."""
    if op.dim == 0:
        return 0.0
    w = np.linalg.eigvalsh(op.matrix)
    return float(np.sum(w <= EXACT_EIG_TOL)) / op.dim


def estimate_kernel_fraction(
    op: GramOperator | DenseOperator,
    cfg: RankEstimatorConfig | None = None,
    *,
    mode: Mode = "stochastic",
    stream: int = 0,
    workers: int | None = None,
    diagnostics: bool = True,
) -> KernelFractionEstimate:
    cfg = (cfg or RankEstimatorConfig()).resolved(op.normalization)
    if op.dim == 0:
        return KernelFractionEstimate(0.0, 0.0, 0, cfg, 0, mode=mode)
    if op.spectral_norm_bound() > 1 + 1e-12:
        raise EstimationError("operator is not normalised (spectral norm > 1)")
    if mode == "exact":
        v = exact_kernel_fraction(op)
        return KernelFractionEstimate(v, 0.0, 0, cfg, op.dim, raw=v, mode="exact")
    if mode != "stochastic":
        raise EstimationError(f"unknown mode {mode!r}")
    coeffs = step_coefficients(cfg.threshold, cfg.degree, cfg.rho)
    q = hutchinson_samples(op.matvec, coeffs, op.dim, cfg.probes, cfg.seed, stream, workers)
    raw = float(q.mean()) / op.dim
    stderr = float(q.std(ddof=1) / math.sqrt(len(q))) / op.dim if len(q) > 1 else 0.0
    under = is_under_resolved(cfg.threshold, cfg.degree, cfg.rho)
    if under:
        warnings.warn(
            f"filter degree {cfg.degree} is too small to resolve threshold {cfg.threshold:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    lam, below = _gap_diagnostic(op, cfg.threshold) if diagnostics else (None, None)
    if below:
        warnings.warn(
            f"smallest nonzero eigenvalue {lam:.3g} lies below threshold {cfg.threshold:.3g}; "
            "small eigenvalues will be counted as kernel",
            RuntimeWarning,
            stacklevel=2,
        )
    return KernelFractionEstimate(
        value=min(1.0, max(0.0, raw)),
        stderr=stderr,
        probes_used=len(q),
        config=cfg,
        dim=op.dim,
        raw=raw,
        mode="stochastic",
        under_resolved=under,
        smallest_nonzero_eigenvalue=lam,
        gap_below_threshold=below,
    )


@dataclass(frozen=True)
class BettiEstimate:
    r: int
    kernel_fraction_r: float
    kernel_fraction_up: float
    ratio: float
    sizes: tuple[int, int]
    stderr: float = 0.0
    mode: str = "stochastic"
    config: RankEstimatorConfig = field(default_factory=RankEstimatorConfig)
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def normalized(self) -> float:
        return self.kernel_fraction_r + self.ratio * self.kernel_fraction_up - self.ratio

    @property
    def absolute(self) -> float:
        return self.normalized * self.sizes[0]

    @property
    def components(self) -> tuple[float, float, float]:
        return self.kernel_fraction_r, self.ratio * self.kernel_fraction_up, -self.ratio

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        return {
            "r": self.r,
            "mode": self.mode,
            "normalized": self.normalized,
            "absolute": self.absolute,
            "stderr": self.stderr,
            "sizes": list(self.sizes),
            "components": {
                "kernel_fraction_r": self.kernel_fraction_r,
                "kernel_fraction_r_plus_1": self.kernel_fraction_up,
                "ratio": self.ratio,
            },
            "config": cfg,
            "seed": self.config.seed,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def estimate_betti_from_sets(
    sets, r: int, cfg: RankEstimatorConfig | None = None, *, mode: Mode = "stochastic", workers=None
) -> BettiEstimate:
    cfg = cfg or RankEstimatorConfig()
    s_r, s_up = sets[r], sets[r + 1]
    if len(s_r) == 0:
        raise EstimationError(f"no {r}-simplices: the normalised Betti number is undefined")
    op_r = gram_operator(boundary_matrix(s_r))
    k_r = estimate_kernel_fraction(op_r, cfg, mode=mode, stream=0, workers=workers)
    diag = {"threshold_r": k_r.config.threshold, "degree_r": k_r.config.degree}
    if k_r.smallest_nonzero_eigenvalue is not None:
        diag["spectral_gap_r"] = k_r.smallest_nonzero_eigenvalue
    if len(s_up):
        op_up = gram_operator(boundary_matrix(s_up))
        k_up = estimate_kernel_fraction(op_up, cfg, mode=mode, stream=1, workers=workers)
        ratio = len(s_up) / len(s_r)
        diag.update(threshold_r_plus_1=k_up.config.threshold, degree_r_plus_1=k_up.config.degree)
        if k_up.smallest_nonzero_eigenvalue is not None:
            diag["spectral_gap_r_plus_1"] = k_up.smallest_nonzero_eigenvalue
        kf_up, se_up = k_up.value, k_up.stderr
        warn = k_r.under_resolved or k_up.under_resolved
    else:
        ratio, kf_up, se_up = 0.0, 0.0, 0.0
        warn = k_r.under_resolved
    if mode == "stochastic":
        diag["under_resolved"] = warn
    return BettiEstimate(
        r=r,
        kernel_fraction_r=k_r.value,
        kernel_fraction_up=kf_up,
        ratio=ratio,
        sizes=(len(s_r), len(s_up)),
        stderr=math.hypot(k_r.stderr, ratio * se_up),
        mode=mode,
        # threshold/degree stay as given (None = per-operator default, see diagnostics)
        config=replace(cfg, probes=k_r.config.probes),
        diagnostics=diag,
    )


def estimate_betti(
    g: Graph,
    r: int,
    cfg: RankEstimatorConfig | None = None,
    *,
    mode: Mode = "stochastic",
    strategy: Strategy = "auto",
    workers: int | None = None,
) -> BettiEstimate:
    """Enumerate S_r and S_{r+1}, form both normalised Gram operators,
    estimate their kernel fractions and combine them into beta_r / |S_r|."""
    if r < 0:
        raise EstimationError(f"dimension must be >= 0, got {r}")
    sets = build_simplex_sets(g, r + 1, strategy)
    return estimate_betti_from_sets(sets, r, cfg, mode=mode, workers=workers)
