"""Link and area performance: error probabilities, rates, sweeps.

The detection-side inputs (signal mean, interference spectrum, noise
mean) come from channel.summarize and detection.collapse_iui; this
module turns them into error probabilities, mutual information, and
area rate efficiency, and drives parameter sweeps over those numbers.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import PhysicalParams, ReceiverGeometry, cir, summarize
from .config import SystemConfig, worker_count
from .detection import IuiSpectrum, collapse_iui, optimal_threshold, sinr_worst, suboptimal_threshold
from .errors import ParameterError
from .gridgeom import GridLayout

__all__ = [
    "ErrorPair",
    "PerfReport",
    "SWEEP_AXES",
    "ber_curve",
    "bsc_capacity",
    "error_probs",
    "evaluate",
    "link_rate",
    "optimize_radius",
    "poisson_decision_curves",
    "spatial_rate",
    "sweep",
]

SWEEP_AXES = ("cell_pitch", "cell_area", "N_mol", "C_noise", "D")

# Neglected interference beyond the outermost enumerated ring, as a
# fraction of the total modeled mean, above which a report is flagged.
TRUNCATION_WARN_FRACTION = 0.02


@dataclass(frozen=True)
class ErrorPair:
    """False-alarm probability p and miss probability q."""

    p: float
    q: float

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class PerfReport:
    """Single-configuration performance summary.

    ``theta_used`` is the threshold the error probabilities were computed
    with; ``theta_opt`` and ``theta_sub`` are both reported regardless of
    which one was used. ``truncation_warning`` flags configurations whose
    interferer list is too short for the pitch.
    """

    theta_used: int
    theta_opt: int
    theta_sub: int
    errors: ErrorPair
    ber: float
    link_rate: float
    spatial_rate: float
    are: float
    sinr_worst: float
    truncation_warning: bool
    cell_pitch: float
    cell_area: float


def poisson_decision_curves(
    theta_max: int,
    mu_s: float,
    values: np.ndarray,
    log_weights: np.ndarray,
    mu_n: float,
):
    """Error probabilities of the rule [r >= theta] for theta = 0..theta_max.

    ``values``/``log_weights`` describe the interference-mean mixture.
    Returns (q_curve, p_curve) arrays of length theta_max + 1, where
    q_curve[t] = sum_w P[Poisson(mu_s + a + mu_n) <= t-1] and
    p_curve[t] = 1 - sum_w P[Poisson(a + mu_n) <= t-1]. The count
    probability mass is accumulated in log space atom by atom so that a
    single pass covers every threshold at once.
    """
    w = np.exp(log_weights)
    lam_on = mu_s + values + mu_n
    lam_off = values + mu_n
    with np.errstate(divide="ignore"):
        log_on = np.log(lam_on)
        log_off = np.log(lam_off)

    q_curve = np.empty(theta_max + 1)
    p_curve = np.empty(theta_max + 1)
    acc_on = np.zeros_like(lam_on)
    acc_off = np.zeros_like(lam_off)
    logp_on = -lam_on
    logp_off = -lam_off
    for theta in range(theta_max + 1):
        q_curve[theta] = float(w @ acc_on)
        p_curve[theta] = 1.0 - float(w @ acc_off)
        acc_on += np.exp(logp_on)
        acc_off += np.exp(logp_off)
        step = math.log(theta + 1)
        logp_on += log_on - step
        logp_off += log_off - step
    return np.clip(q_curve, 0.0, 1.0), np.clip(p_curve, 0.0, 1.0)


def error_probs(theta: int, mu_s: float, spectrum: IuiSpectrum, mu_n: float) -> ErrorPair:
    """Miss and false-alarm probabilities of the threshold detector.

    theta = 0 always decides 1, so (p, q) = (1, 0).
    """
    if not isinstance(theta, int) or isinstance(theta, bool) or theta < 0:
        raise ParameterError(f"theta must be a nonnegative integer, got {theta!r}")
    if theta == 0:
        return ErrorPair(p=1.0, q=0.0)
    q_curve, p_curve = poisson_decision_curves(
        theta, mu_s, spectrum.values, spectrum.log_weights, mu_n
    )
    return ErrorPair(p=float(p_curve[theta]), q=float(q_curve[theta]))


def ber_curve(theta_max: int, mu_s: float, spectrum: IuiSpectrum, mu_n: float) -> np.ndarray:
    """Analytic BER at every threshold 0..theta_max in one pass."""
    if theta_max < 0:
        raise ParameterError(f"theta_max must be nonnegative, got {theta_max}")
    q_curve, p_curve = poisson_decision_curves(
        theta_max, mu_s, spectrum.values, spectrum.log_weights, mu_n
    )
    return 0.5 * (q_curve + p_curve)


def _h2(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def link_rate(errors: ErrorPair) -> float:
    """Mutual information of the equiprobable binary channel, bits/use."""
    p, q = errors.p, errors.q
    p_hat_one = 0.5 * (1.0 - q) + 0.5 * p
    rate = _h2(p_hat_one) - 0.5 * (_h2(p) + _h2(q))
    return min(1.0, max(0.0, rate))


def bsc_capacity(ber: float) -> float:
    """1 - H2(ber); equals link_rate when p = q."""
    if not (0.0 <= ber <= 1.0):
        raise ParameterError(f"ber must lie in [0, 1], got {ber}")
    return 1.0 - _h2(ber)


def spatial_rate(cell_area: float) -> float:
    """Transmissions per square meter: the reciprocal cell area."""
    if not cell_area > 0:
        raise ParameterError(f"cell_area must be positive, got {cell_area}")
    return 1.0 / cell_area


def _simpson(f, a: float, b: float, n: int) -> float:
    """Composite Simpson rule with n (even) intervals."""
    h = (b - a) / n
    total = f(a) + f(b)
    for i in range(1, n):
        total += f(a + i * h) * (4.0 if i % 2 else 2.0)
    return total * h / 3.0


def _neglected_tail(
    params: PhysicalParams,
    geom: ReceiverGeometry,
    layout: GridLayout,
    t_m: float,
    gamma_form: str,
) -> float:
    """Estimated mean interference from sites beyond the outermost ring.

    Continuum approximation: site density 1/A_cell outside the enumerated
    region, integrated against the channel response at the decision time.
    The series order grows with r_i^2/(4 D t) so far rings stay accurate.
    """
    from .gridgeom import cell_area as _cell_area

    r_out = layout.ring_sizes[-1][0]
    a_cell = _cell_area(layout.kind, layout.pitch)
    width = math.sqrt(4.0 * params.D * t_m)
    r_end = r_out + 8.0 * width + 2.0 * params.s_rx
    if r_end <= r_out:
        return 0.0

    def integrand(r: float) -> float:
        rho = r * r / (4.0 * params.D * t_m)
        k_eff = max(20, int(rho + 12.0 * math.sqrt(rho) + 30.0))
        h = cir(t_m, r, params, geom, k_max=k_eff, gamma_form=gamma_form)
        return params.n_mol * h * 2.0 * math.pi * r / a_cell

    return _simpson(integrand, r_out, r_end, 64)


def evaluate(config: SystemConfig) -> PerfReport:
    """Analytic performance of one configuration at the peak-CIR decision time."""
    params = config.params()
    geom = config.geometry()
    layout = config.layout()
    summary = summarize(
        params,
        geom,
        layout,
        k_max=config.k_max,
        gamma_form=config.gamma_form,
        search_horizon=config.horizon,
    )
    spectrum = collapse_iui(summary.cbar, atom_cap=config.atom_cap)
    theta_cap = config.theta_cap if config.theta_cap > 0 else None
    theta_opt = optimal_threshold(summary.mu_s, spectrum, summary.mu_n, theta_cap=theta_cap)
    sub = suboptimal_threshold(summary.mu_s, summary.cbar_sum, summary.mu_n)
    theta_used = theta_opt if config.threshold_mode == "optimal" else sub.theta

    errors = error_probs(theta_used, summary.mu_s, spectrum, summary.mu_n)
    ber = 0.5 * (errors.p + errors.q)
    rate = link_rate(errors)
    area = config.cell_area
    srate = spatial_rate(area)

    tail = _neglected_tail(params, geom, layout, summary.t_m, config.gamma_form)
    modeled = summary.mu_s + summary.cbar_sum
    warn = tail > TRUNCATION_WARN_FRACTION * modeled if modeled > 0 else False

    return PerfReport(
        theta_used=theta_used,
        theta_opt=theta_opt,
        theta_sub=sub.theta,
        errors=errors,
        ber=ber,
        link_rate=rate,
        spatial_rate=srate,
        are=rate * srate,
        sinr_worst=sinr_worst(summary.mu_s, summary.cbar_sum),
        truncation_warning=warn,
        cell_pitch=config.pitch,
        cell_area=area,
    )


def _apply_axis(config: SystemConfig, axis: str, value) -> SystemConfig:
    if axis == "cell_pitch":
        return dataclasses.replace(config, c=float(value))
    if axis == "cell_area":
        area = float(value)
        if area <= 0:
            raise ParameterError(f"cell_area must be positive, got {area}")
        # Both grids share A = (sqrt(3)/2) c^2 in terms of the hex pitch.
        return dataclasses.replace(config, c=math.sqrt(2.0 * area / math.sqrt(3.0)))
    if axis == "N_mol":
        n = int(value)
        if n != value:
            raise ParameterError(f"N_mol must be an integer, got {value}")
        return dataclasses.replace(config, n_mol=n)
    if axis == "C_noise":
        return dataclasses.replace(config, c_noise=float(value))
    if axis == "D":
        return dataclasses.replace(config, diff=float(value))
    raise ParameterError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def sweep(config: SystemConfig, axis: str, values) -> list[PerfReport]:
    """Evaluate the configuration once per axis value, in input order.

    A failure at any point aborts the whole sweep and names the value
    that caused it. MC_ARELAB_THREADS > 1 evaluates points concurrently;
    the result order and content do not depend on the thread count.
    """
    if axis not in SWEEP_AXES:
        raise ParameterError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ParameterError("sweep requires at least one axis value")

    def run_one(value):
        try:
            return evaluate(_apply_axis(config, axis, value))
        except Exception as exc:
            raise ParameterError(f"sweep failed at {axis} = {value}: {exc}") from exc

    workers = worker_count()
    if workers == 1:
        return [run_one(value) for value in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, values))


def optimize_radius(config: SystemConfig, w_max: int = 25, step_frac: float = 0.02):
    """Grid search over receiver radii S = step_frac * w * pitch, w = 1..w_max.

    Returns the ARE-maximizing radius and its report; ties keep the
    smaller radius.
    """
    if not isinstance(w_max, int) or isinstance(w_max, bool) or w_max < 1:
        raise ParameterError(f"w_max must be a positive integer, got {w_max!r}")
    if not step_frac > 0:
        raise ParameterError(f"step_frac must be positive, got {step_frac}")
    best_radius = None
    best_report = None
    for w in range(1, w_max + 1):
        radius = step_frac * w * config.pitch
        report = evaluate(dataclasses.replace(config, s_rx=radius))
        if best_report is None or report.are > best_report.are:
            best_radius, best_report = radius, report
    return best_radius, best_report
