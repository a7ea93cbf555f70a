"""Detection at the reference receiver under statistically known interference.

The receiver observes a Poisson count whose mean depends on the desired
bit, on which interferers happened to transmit, and on background noise.
Interferers at equal distance are statistically identical, so the
2^(N-1) interference patterns collapse to one atom per multiplicity
tuple across rings; every likelihood sum here runs over those atoms in
log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError, SearchError
from .specfun import LogWeightedValue, log_sum_exp

__all__ = [
    "DetectorSpec",
    "IuiSpectrum",
    "SuboptimalThreshold",
    "characterize",
    "collapse_iui",
    "ml_decide",
    "optimal_threshold",
    "sinr_worst",
    "suboptimal_threshold",
    "threshold_set",
]

RING_MERGE_REL = 1e-9


@dataclass(frozen=True)
class IuiSpectrum:
    """Distribution of the total interference mean, one atom per outcome."""

    values: np.ndarray
    log_weights: np.ndarray
    ring_basis: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if self.values.shape != self.log_weights.shape or self.values.ndim != 1:
            raise ParameterError("values and log_weights must be matching 1D arrays")
        if self.values.size == 0:
            raise ParameterError("a spectrum needs at least the empty-interference atom")
        if np.any(self.values < 0):
            raise ParameterError("atom values must be nonnegative")
        norm = float(np.exp(self.log_weights - self.log_weights.max()).sum())
        norm = math.exp(self.log_weights.max()) * norm
        if abs(norm - 1.0) > 1e-10:
            raise ParameterError(f"atom weights sum to {norm}, expected 1")
        self.values.setflags(write=False)
        self.log_weights.setflags(write=False)

    @cached_property
    def atoms(self) -> tuple[LogWeightedValue, ...]:
        """Atom view as value/log-weight records; meant for small spectra."""
        return tuple(
            LogWeightedValue(float(v), min(0.0, float(w)))
            for v, w in zip(self.values, self.log_weights)
        )

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    @property
    def cbar_sum(self) -> float:
        return math.fsum(cbar * count for cbar, count in self.ring_basis)


@dataclass(frozen=True)
class SuboptimalThreshold:
    """Closed-form threshold: integer value, raw real value, degeneracy flag."""

    theta: int
    raw: float
    degenerate: bool


@dataclass(frozen=True)
class DetectorSpec:
    """Detector characterization reported per configuration."""

    theta_opt: int
    theta_sub: int
    threshold_set_size: int
    sinr_worst: float


def _merge_rings(ring_basis) -> list[tuple[float, int]]:
    merged: list[list[float | int]] = []
    for cbar, count in ring_basis:
        cbar = float(cbar)
        if not cbar >= 0.0:
            raise ParameterError(f"ring mean must be nonnegative, got {cbar}")
        if not isinstance(count, (int, np.integer)) or isinstance(count, bool) or count < 1:
            raise ParameterError(f"ring multiplicity must be a positive integer, got {count!r}")
        for entry in merged:
            ref = float(entry[0])
            if abs(cbar - ref) <= RING_MERGE_REL * max(cbar, ref):
                entry[1] = int(entry[1]) + int(count)
                break
        else:
            merged.append([cbar, int(count)])
    return [(float(c), int(n)) for c, n in merged]


def collapse_iui(ring_basis, atom_cap: int = 10**6) -> IuiSpectrum:
    """Collapse per-interferer on/off patterns into per-ring activity counts.

    Rings whose means agree within 1e-9 relative are merged first. Each
    atom is one tuple of per-ring active counts; its weight is the product
    of Binomial(n_j, 1/2) masses, accumulated in log space. The result is
    exactly the distribution induced by exhaustive pattern enumeration.
    """
    merged = _merge_rings(ring_basis)
    n_atoms = 1
    for _, count in merged:
        n_atoms *= count + 1
    if n_atoms > atom_cap:
        raise ParameterError(
            f"collapse would produce {n_atoms} atoms (cap {atom_cap}); "
            "merge nearby rings or raise the ring merge tolerance"
        )

    values = np.zeros(1)
    log_weights = np.zeros(1)
    ln2 = math.log(2.0)
    for cbar, count in merged:
        k = np.arange(count + 1)
        lgamma = np.array([math.lgamma(i + 1.0) for i in range(count + 1)])
        ring_logw = lgamma[-1] - lgamma - lgamma[::-1] - count * ln2
        values = (values[:, None] + cbar * k[None, :]).ravel()
        log_weights = (log_weights[:, None] + ring_logw[None, :]).ravel()
    return IuiSpectrum(values=values, log_weights=log_weights, ring_basis=tuple(merged))


def _log_poisson_score(r: int, lam: np.ndarray) -> np.ndarray:
    """r ln(lam) - lam elementwise, with the 0^0 = 1 convention at lam = 0."""
    out = np.full(lam.shape, -math.inf)
    pos = lam > 0
    out[pos] = r * np.log(lam[pos]) - lam[pos]
    if r == 0:
        out[~pos] = 0.0
    return out


def _check_means(mu_s: float, mu_n: float) -> None:
    if not mu_s > 0:
        raise ParameterError(f"mu_s must be positive, got {mu_s}")
    if mu_n < 0:
        raise ParameterError(f"mu_n must be nonnegative, got {mu_n}")


def ml_decide(r: int, mu_s: float, spectrum: IuiSpectrum, mu_n: float) -> int:
    """Maximum-likelihood bit decision for an observed count r."""
    if not isinstance(r, (int, np.integer)) or isinstance(r, bool) or r < 0:
        raise ParameterError(f"r must be a nonnegative integer, got {r!r}")
    _check_means(mu_s, mu_n)
    r = int(r)
    on = log_sum_exp(_log_poisson_score(r, mu_s + spectrum.values + mu_n) + spectrum.log_weights)
    off = log_sum_exp(_log_poisson_score(r, spectrum.values + mu_n) + spectrum.log_weights)
    return 1 if on >= off else 0


def optimal_threshold(
    mu_s: float,
    spectrum: IuiSpectrum,
    mu_n: float,
    theta_cap: int | None = None,
) -> int:
    """Smallest integer count at which deciding 1 becomes maximum likelihood."""
    _check_means(mu_s, mu_n)
    if theta_cap is None:
        theta_cap = 10 * math.ceil(mu_s + spectrum.max_value + mu_n) + 50
    if theta_cap < 1:
        raise ParameterError(f"theta_cap must be >= 1, got {theta_cap}")
    lam_on = mu_s + spectrum.values + mu_n
    lam_off = spectrum.values + mu_n
    for theta in range(theta_cap + 1):
        on = log_sum_exp(_log_poisson_score(theta, lam_on) + spectrum.log_weights)
        off = log_sum_exp(_log_poisson_score(theta, lam_off) + spectrum.log_weights)
        if on >= off:
            return theta
    raise SearchError(f"no threshold up to {theta_cap} flips the likelihood ratio; raise theta_cap")


def threshold_set(
    mu_s: float,
    spectrum: IuiSpectrum,
    mu_n: float,
    phi_max: float | None = None,
) -> list[int]:
    """Integer ceilings of all real crossings of the likelihood balance.

    The balance function compares both likelihood mixtures at a real
    exponent; its sign changes are bracketed on a 0.25-step scan and
    bisected to 1e-9. A single crossing is the typical case.
    """
    _check_means(mu_s, mu_n)
    if phi_max is None:
        phi_max = float(10 * math.ceil(mu_s + spectrum.max_value + mu_n) + 50)
    if phi_max < 1:
        raise ParameterError(f"phi_max must be >= 1, got {phi_max}")

    lam_on = mu_s + spectrum.values + mu_n
    lam_off = spectrum.values + mu_n
    log_w = spectrum.log_weights

    def balance(phi: float) -> float:
        on = _score_real(phi, lam_on)
        off = _score_real(phi, lam_off)
        lhs = log_sum_exp(on + log_w)
        rhs = log_sum_exp(off + log_w)
        if lhs == rhs:
            return 0.0
        if math.isinf(rhs) and rhs < 0:
            return math.inf
        return lhs - rhs

    def _score_real(phi: float, lam: np.ndarray) -> np.ndarray:
        out = np.full(lam.shape, -math.inf)
        pos = lam > 0
        out[pos] = phi * np.log(lam[pos]) - lam[pos]
        if phi == 0.0:
            out[~pos] = 0.0
        return out

    roots: list[float] = []
    step = 0.25
    n_steps = int(math.ceil(phi_max / step))
    prev_phi = 0.0
    prev_val = balance(0.0)
    if prev_val == 0.0:
        roots.append(0.0)
    for i in range(1, n_steps + 1):
        phi = min(i * step, phi_max)
        val = balance(phi)
        if val == 0.0:
            roots.append(phi)
        elif (val > 0) != (prev_val > 0):
            lo, hi = prev_phi, phi
            lo_val = prev_val
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                mid_val = balance(mid)
                if mid_val == 0.0:
                    lo = hi = mid
                    break
                if (mid_val > 0) == (lo_val > 0):
                    lo, lo_val = mid, mid_val
                else:
                    hi = mid
                if hi - lo < 1e-9:
                    break
            roots.append(0.5 * (lo + hi))
        prev_phi, prev_val = phi, val

    out = sorted({max(1, math.ceil(root)) for root in roots})
    return out


def suboptimal_threshold(mu_s: float, cbar_sum: float, mu_n: float) -> SuboptimalThreshold:
    """Closed-form threshold from the average-interference approximation."""
    _check_means(mu_s, mu_n)
    if cbar_sum < 0:
        raise ParameterError(f"cbar_sum must be nonnegative, got {cbar_sum}")
    denom_mean = 0.5 * cbar_sum + mu_n
    if denom_mean == 0.0:
        # the log argument diverges and the raw threshold collapses to 0
        return SuboptimalThreshold(theta=1, raw=0.0, degenerate=True)
    raw = mu_s / math.log1p(mu_s / denom_mean)
    return SuboptimalThreshold(theta=math.ceil(raw), raw=raw, degenerate=False)


def sinr_worst(mu_s: float, cbar_sum: float) -> float:
    """Signal mean over the all-interferers-active mean; inf when no IUI."""
    _check_means(mu_s, 0.0)
    if cbar_sum < 0:
        raise ParameterError(f"cbar_sum must be nonnegative, got {cbar_sum}")
    if cbar_sum == 0.0:
        return math.inf
    return mu_s / cbar_sum


def characterize(
    mu_s: float,
    spectrum: IuiSpectrum,
    mu_n: float,
    theta_cap: int | None = None,
    phi_max: float | None = None,
) -> DetectorSpec:
    """Bundle the per-configuration detector quantities the CLI reports."""
    theta_opt = optimal_threshold(mu_s, spectrum, mu_n, theta_cap=theta_cap)
    sub = suboptimal_threshold(mu_s, spectrum.cbar_sum, mu_n)
    thresholds = threshold_set(mu_s, spectrum, mu_n, phi_max=phi_max)
    return DetectorSpec(
        theta_opt=theta_opt,
        theta_sub=sub.theta,
        threshold_set_size=len(thresholds),
        sinr_worst=sinr_worst(mu_s, spectrum.cbar_sum),
    )
