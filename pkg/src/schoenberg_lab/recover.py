"""Recovering the mixing measure from a radial profile.

Given samples f(t_j) of a radial profile, the mixing measure is the
nonnegative solution of the discretized transform equations

    sum_k exp(-t_j^2 s_k / 2) w_k  =  f(t_j),

an inverse Laplace-type problem solved here by active-set nonnegative least
squares. The problem is severely ill-conditioned: pointwise atom recovery is
not achievable and the comparison metrics (W1, KS) are deliberately weak.
Mass normalization is enforced with a heavily weighted penalty row followed
by exact renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .measures import MixingMeasure, mixture_laplace

PENALTY_FACTOR = 1e3
PRUNE_THRESHOLD = 1e-12


class NNLSConvergenceError(RuntimeError):
    """Iteration cap exceeded; carries the best iterate found so far."""

    def __init__(self, message: str, best: np.ndarray, iterations: int):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


def default_t_grid() -> np.ndarray:
    """41 equispaced points on [0, 4]."""
    return np.linspace(0.0, 4.0, 41)


def default_s_grid() -> np.ndarray:
    """241 log-spaced scales on [1e-3, 1e3] (40 per decade, includes s = 1)."""
    return np.logspace(-3.0, 3.0, 241)


@dataclass(frozen=True)
class RecoveryProblem:
    """Profile samples plus the scale grid to recover atoms on."""

    t_grid: np.ndarray
    f_values: np.ndarray
    s_grid: np.ndarray = field(default_factory=default_s_grid)
    normalize_mass: bool = True
    ridge: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        f = np.asarray(self.f_values, dtype=float)
        s = np.asarray(self.s_grid, dtype=float)
        if t.ndim != 1 or t.shape != f.shape or len(t) == 0:
            raise ValueError("t_grid and f_values must be equal-length 1-d arrays")
        if s.ndim != 1 or len(s) == 0:
            raise ValueError("s_grid must be a nonempty 1-d array")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(f)) and np.all(np.isfinite(s))):
            raise ValueError("grids and values must be finite")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be strictly increasing and include 0")
        if abs(f[0] - 1.0) > 1e-9:
            raise ValueError(f"f at t=0 must be 1, got {f[0]!r}")
        if np.any(f < 0) or np.any(f > 1 + 1e-12):
            raise ValueError("f values must lie in [0, 1]")
        if np.any(s <= 0) or np.any(np.diff(s) <= 0):
            raise ValueError("s_grid must be strictly increasing and positive")
        if self.ridge < 0:
            raise ValueError("ridge must be nonnegative")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "f_values", f)
        object.__setattr__(self, "s_grid", s)

    @classmethod
    def from_csv(cls, path, s_grid=None, normalize_mass: bool = True,
                 ridge: float = 0.0) -> "RecoveryProblem":
        """Load (t, f) samples from a CSV with header ``t,f``."""
        import csv

        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:2]] != ["t", "f"]:
                raise ValueError(f"{path}: expected header 't,f', got {header!r}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        t, f = map(np.asarray, zip(*rows))
        return cls(t, f, s_grid if s_grid is not None else default_s_grid(),
                   normalize_mass=normalize_mass, ridge=ridge)


@dataclass(frozen=True)
class RecoveryResult:
    measure: MixingMeasure
    residual_norm: float  # RMS over t_grid of the final measure's misfit
    iterations: int
    mass_deficit: float  # |1 - sum w| of the raw solution, before renormalization


def design_matrix(t_grid, s_grid) -> np.ndarray:
    """A[j, k] = exp(-t_j^2 s_k / 2); the row for t = 0 is all ones."""
    t = np.asarray(t_grid, dtype=float)
    s = np.asarray(s_grid, dtype=float)
    return np.exp(-0.5 * np.outer(np.square(t), s))


def nnls(A, b, ridge: float = 0.0, max_iter: int | None = None) -> tuple[np.ndarray, int]:
    """Lawson-Hanson active-set solve of min ||Aw - b||^2 + ridge ||w||^2, w >= 0.

    Returns (w, iterations). The returned w is exactly nonnegative (active
    set, not projection) and satisfies the KKT conditions to within
    10 * eps * max(m, n) * ||A||_1 * ||r||_inf, far inside the contract
    bound of 1e-10 * ||A^T b||. Raises :class:`NNLSConvergenceError` with
    the best iterate attached when the iteration cap (default 10 * cols)
    is exceeded.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != len(b):
        raise ValueError(f"shape mismatch: A is {A.shape}, b has length {len(b)}")
    if ridge > 0:
        A = np.vstack([A, np.sqrt(ridge) * np.eye(A.shape[1])])
        b = np.concatenate([b, np.zeros(A.shape[1])])
    m, n = A.shape
    if max_iter is None:
        max_iter = 10 * n
    eps = np.finfo(float).eps
    grad_scale = 10.0 * max(m, n) * eps * np.linalg.norm(A, 1)

    w = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    residual = b.copy()
    grad = A.T @ residual
    objective = float(residual @ residual)
    iterations = 0
    while True:
        tol = grad_scale * max(float(np.abs(residual).max(initial=0.0)), eps)
        candidates = np.where(passive, -np.inf, grad)
        j = int(np.argmax(candidates))
        if candidates[j] <= tol:
            return w, iterations
        passive[j] = True
        while True:
            if iterations >= max_iter:
                raise NNLSConvergenceError(
                    f"NNLS did not converge within {max_iter} iterations",
                    best=w, iterations=iterations,
                )
            iterations += 1
            trial = np.zeros(n)
            trial[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
            if trial[passive].min() > 0:
                w = trial
                break
            # step toward the unconstrained solution until a weight hits zero
            blocking = passive & (trial <= 0)
            step = float(np.min(w[blocking] / (w[blocking] - trial[blocking])))
            w = w + step * (trial - w)
            passive &= w > 0
            w[~passive] = 0.0
        residual = b - A @ w
        new_objective = float(residual @ residual)
        if new_objective > objective * (1.0 - 1e-13):
            return w, iterations  # no numerically meaningful progress left
        objective = new_objective
        grad = A.T @ residual


def recover_mixing(problem: RecoveryProblem, max_iter: int | None = None) -> RecoveryResult:
    """Solve the inverse problem and package the result as a MixingMeasure.

    With ``normalize_mass`` a penalty row of ones, weighted by
    1e3 * max|A|, softly enforces total mass 1 during the solve. Atoms below
    the pruning threshold are dropped and the output weights renormalized
    exactly, so the returned measure is always a valid probability measure;
    ``mass_deficit`` records how far the raw solution was from unit mass
    (it is tiny when the penalty row was active, and a genuine diagnostic
    when it was not).
    """
    A = design_matrix(problem.t_grid, problem.s_grid)
    rows, rhs = A, problem.f_values
    if problem.normalize_mass:
        penalty = PENALTY_FACTOR * float(np.abs(A).max())
        rows = np.vstack([A, penalty * np.ones((1, A.shape[1]))])
        rhs = np.concatenate([problem.f_values, [penalty]])
    w, iterations = nnls(rows, rhs, ridge=problem.ridge, max_iter=max_iter)

    keep = w > PRUNE_THRESHOLD
    if not np.any(keep):
        raise ValueError("recovered measure has no atoms above the pruning threshold")
    scales = problem.s_grid[keep]
    weights = w[keep]
    deficit = abs(1.0 - float(weights.sum()))
    measure = MixingMeasure(scales, weights / weights.sum(), label="recovered")
    fitted = mixture_laplace(measure, problem.t_grid)
    residual = float(np.sqrt(np.mean(np.square(fitted - problem.f_values))))
    return RecoveryResult(measure=measure, residual_norm=residual,
                          iterations=iterations, mass_deficit=deficit)


# --- measure comparison ---------------------------------------------------


def _cdf_on_grid(measure, grid: np.ndarray) -> np.ndarray:
    return np.asarray(measure.cdf(grid), dtype=float)


def _merged_support(a, b) -> np.ndarray:
    return np.union1d(np.asarray(a.support, dtype=float), np.asarray(b.support, dtype=float))


def wasserstein1(a, b) -> float:
    """Exact W1 between two discrete measures: integral of |CDF_a - CDF_b|.

    Accepts MixingMeasure or EmpiricalMeasure (anything with ``support``
    and ``cdf``). Both CDFs are step functions, so the integral is a finite
    sum over the merged support.
    """
    grid = _merged_support(a, b)
    fa = _cdf_on_grid(a, grid)
    fb = _cdf_on_grid(b, grid)
    if len(grid) == 1:
        return 0.0
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(grid)))


def ks_distance(a, b) -> float:
    """Sup-norm distance of the CDFs over the merged support."""
    grid = _merged_support(a, b)
    return float(np.abs(_cdf_on_grid(a, grid) - _cdf_on_grid(b, grid)).max())
