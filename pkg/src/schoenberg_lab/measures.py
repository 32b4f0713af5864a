"""Discrete mixing measures and the Gaussian scale mixtures they induce.

A mixing measure nu is a probability measure on scales s >= 0, held here as
atoms (s_k, w_k). It induces, for every dimension n, the law of sqrt(S) * Z
with S ~ nu and Z standard normal in R^n. Two transforms matter:

* ``mixture_laplace(nu, t)`` = sum_k w_k exp(-t^2 s_k / 2), the radial
  profile generated by nu;
* ``mixture_cf(m, x)``, the characteristic function of the n-dimensional
  mixture, which equals the profile at ||x|| by radial symmetry.

Continuous catalog laws (Exp, Levy) are represented by midpoint-rule atom
discretizations on a log-spaced grid; the truncated tail mass is recorded in
the label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .profiles import RadialProfile
from .rng import ROLE_NOISE, ROLE_SCALE, substream

MASS_TOL = 1e-9

# Asymptotic two-sample KS critical scale: c(alpha) = sqrt(-ln(alpha/2)/2).
KS_ALPHA = 0.01


@dataclass(frozen=True)
class MixingMeasure:
    """Probability measure on R+ given by atoms (scales, weights)."""

    scales: np.ndarray
    weights: np.ndarray
    label: str = "measure"

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if s.ndim != 1 or s.shape != w.shape or len(s) == 0:
            raise ValueError("scales and weights must be equal-length 1-d arrays")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(w))):
            raise ValueError("atoms must be finite")
        if np.any(s < 0):
            raise ValueError("scales must be nonnegative")
        if np.any(np.diff(s) <= 0):
            raise ValueError("scales must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        total = w.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1 within {MASS_TOL}")
        object.__setattr__(self, "scales", s)
        object.__setattr__(self, "weights", w)

    @property
    def support(self) -> np.ndarray:
        return self.scales

    def cdf(self, x) -> np.ndarray:
        """Right-continuous CDF evaluated at x (scalar or array)."""
        x = np.asarray(x, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        out = cum[np.searchsorted(self.scales, x, side="right")]
        return float(out) if x.ndim == 0 else out

    def mean(self) -> float:
        return float(self.scales @ self.weights)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "atoms": [{"s": float(s), "w": float(w)}
                      for s, w in zip(self.scales, self.weights)],
        }

    @classmethod
    def from_dict(cls, data: dict, renormalize: bool = False) -> "MixingMeasure":
        """Build from the JSON dict form; validates invariants.

        Unsorted or non-normalized input is rejected unless ``renormalize``
        is set, which rescales the weights to total mass 1 (sorting is never
        silently fixed).
        """
        atoms = data.get("atoms")
        if not atoms:
            raise ValueError("measure JSON needs a non-empty 'atoms' list")
        s = np.array([a["s"] for a in atoms], dtype=float)
        w = np.array([a["w"] for a in atoms], dtype=float)
        if renormalize:
            total = w.sum()
            if total <= 0:
                raise ValueError("cannot renormalize: total mass is not positive")
            w = w / total
        return cls(s, w, label=str(data.get("label", "measure")))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path, renormalize: bool = False) -> "MixingMeasure":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), renormalize=renormalize)


@dataclass(frozen=True)
class GaussianScaleMixture:
    """The n-dimensional Gaussian scale mixture induced by a mixing measure."""

    measure: MixingMeasure
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")


def mixture_laplace(measure: MixingMeasure, t) -> np.ndarray | float:
    """sum_k w_k exp(-t^2 s_k / 2) for t >= 0 (scalar or array)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = np.exp(-0.5 * np.multiply.outer(np.square(t), measure.scales)) @ measure.weights
    return float(out) if t.ndim == 0 else out


def mixture_cf(mixture: GaussianScaleMixture, x) -> float:
    """Characteristic function of the mixture at the n-vector x (real-valued)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (mixture.n,):
        raise ValueError(f"x has shape {x.shape}, mixture lives in R^{mixture.n}")
    return float(mixture_laplace(mixture.measure, np.linalg.norm(x)))


def profile_from_measure(measure: MixingMeasure) -> RadialProfile:
    """The radial profile t -> mixture_laplace(nu, t) as a RadialProfile."""
    return RadialProfile(
        label=f"mixture[{measure.label}]",
        fn=lambda t: np.exp(-0.5 * np.multiply.outer(np.square(t), measure.scales))
        @ measure.weights,
    )


def draw_scales(measure: MixingMeasure, count: int, rng: np.random.Generator) -> np.ndarray:
    """Categorical draw of scales by cumulative inverse-CDF search.

    Fixed choice (not the alias method) so streams are reproducible across
    versions: u ~ U[0,1), then the first atom whose cumulative weight
    exceeds u.
    """
    cum = np.cumsum(measure.weights)
    cum[-1] = 1.0  # guard the top edge against rounding
    idx = np.searchsorted(cum, rng.random(count), side="right")
    return measure.scales[idx]


def _sample(mixture: GaussianScaleMixture, count: int,
            scale_rng: np.random.Generator, noise_rng: np.random.Generator) -> np.ndarray:
    scales = draw_scales(mixture.measure, count, scale_rng)
    noise = noise_rng.standard_normal((count, mixture.n))
    return np.sqrt(scales)[:, None] * noise


def sample_mixture(mixture: GaussianScaleMixture, count: int, seed: int = 0) -> np.ndarray:
    """Draw ``count`` points of the n-dimensional mixture; (count, n) array."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _sample(mixture, count,
                   substream(seed, ROLE_SCALE), substream(seed, ROLE_NOISE))


# --- catalog measures ---------------------------------------------------


def dirac(scale: float) -> MixingMeasure:
    """Point mass at a single scale."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    return MixingMeasure(np.array([float(scale)]), np.array([1.0]),
                         label=f"delta({scale:g})")


def discretize_density(pdf: Callable[[np.ndarray], np.ndarray], label: str,
                       atoms: int = 400, s_min: float = 1e-3,
                       s_max: float = 1e3) -> MixingMeasure:
    """Midpoint-rule atom discretization of a density on a log-spaced grid.

    Weights are renormalized to total mass 1; the mass lost to truncation is
    recorded in the label.
    """
    edges = np.logspace(np.log10(s_min), np.log10(s_max), atoms + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    w = pdf(centers) * np.diff(edges)
    keep = w > 0
    centers, w = centers[keep], w[keep]
    deficit = 1.0 - w.sum()
    return MixingMeasure(centers, w / w.sum(),
                         label=f"{label}[tail-deficit={deficit:.2e}]")


def exponential_measure(rate: float = 1.0, atoms: int = 400,
                        s_min: float = 1e-3, s_max: float = 1e3) -> MixingMeasure:
    """Discretized Exp(rate) mixing law; generates f(t) = (1 + t^2/(2 rate))^-1."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return discretize_density(lambda s: rate * np.exp(-rate * s), f"exp({rate:g})",
                              atoms=atoms, s_min=s_min, s_max=s_max)


def levy_measure(scale: float = 1.0, atoms: int = 400,
                 s_min: float = 1e-3, s_max: float = 1e3) -> MixingMeasure:
    """Discretized Levy (one-sided stable 1/2) law; generates f(t) = exp(-t sqrt(scale))."""
    if scale <= 0:
        raise ValueError("scale must be positive")

    def pdf(s):
        return np.sqrt(scale / (2.0 * np.pi)) * s ** -1.5 * np.exp(-scale / (2.0 * s))

    return discretize_density(pdf, f"levy({scale:g})",
                              atoms=atoms, s_min=s_min, s_max=s_max)


def resolve_measure(spec: str, renormalize: bool = False) -> MixingMeasure:
    """Path to a measure JSON file, or a shorthand like ``delta:1``, ``exp:1``, ``levy:1``."""
    from os.path import exists

    if exists(spec):
        return MixingMeasure.load(spec, renormalize=renormalize)
    name, _, arg = spec.partition(":")
    value = float(arg) if arg else 1.0
    factories = {"delta": dirac, "exp": exponential_measure, "levy": levy_measure}
    if name in factories:
        return factories[name](value)
    raise KeyError(
        f"{spec!r} is neither a measure JSON path nor a shorthand "
        "(delta:S, exp:RATE, levy:SCALE)"
    )


# --- marginal consistency -----------------------------------------------


@dataclass(frozen=True)
class ConsistencyReport:
    """Two-sample KS comparison of mu_{n+1} marginalized against mu_n."""

    ks_first_coordinate: float
    ks_squared_norm: float
    critical_value: float
    count: int
    alpha: float
    passed: bool


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.abs(fa - fb).max())


def ks_critical_value(count: int, alpha: float = KS_ALPHA) -> float:
    """Asymptotic two-sample critical value c(alpha) * sqrt(2 / count)."""
    return float(np.sqrt(-np.log(alpha / 2.0) / 2.0) * np.sqrt(2.0 / count))


def marginal_consistency_check(mixture: GaussianScaleMixture, count: int = 10_000,
                               seed: int = 0, corrupt_scale: float = 1.0,
                               alpha: float = KS_ALPHA) -> ConsistencyReport:
    """Check that dropping the last coordinate of mu_{n+1} reproduces mu_n.

    Draws ``count`` samples from the (n+1)-dimensional mixture, drops the
    last coordinate, draws ``count`` fresh samples from the n-dimensional
    mixture, and compares (a) the first coordinate and (b) the squared norm
    of the n-dimensional projections by two-sample KS. Passes iff both
    statistics are below the asymptotic alpha-level critical value.

    ``corrupt_scale`` rescales the (n+1)-dimensional sample and exists as a
    negative control: any value other than 1 should make the check fail at
    desk-scale counts.
    """
    if count < 100:
        raise ValueError("count must be >= 100")
    n = mixture.n
    higher = GaussianScaleMixture(mixture.measure, n + 1)
    y_high = _sample(higher, count, substream(seed, ROLE_SCALE, 0),
                     substream(seed, ROLE_NOISE, 0)) * corrupt_scale
    y_low = _sample(mixture, count, substream(seed, ROLE_SCALE, 1),
                    substream(seed, ROLE_NOISE, 1))
    projected = y_high[:, :n]
    ks_first = ks_two_sample(projected[:, 0], y_low[:, 0])
    ks_norm = ks_two_sample(np.sum(projected**2, axis=1), np.sum(y_low**2, axis=1))
    crit = ks_critical_value(count, alpha)
    return ConsistencyReport(
        ks_first_coordinate=ks_first,
        ks_squared_norm=ks_norm,
        critical_value=crit,
        count=count,
        alpha=alpha,
        passed=ks_first < crit and ks_norm < crit,
    )
