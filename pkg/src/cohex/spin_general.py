"""Coherences at arbitrary inter-spin coupling, and the small-t validity maps.

For arbitrary coupling t the pair Hamiltonian is diagonal in a mixed
basis parameterized by a single angle.  The second-order steady-state
coherences then become integrals of the bath spectral density against
rational-hyperbolic kernels of the bath frequency: three kernels for the
first spin, two for the second.  The kernels have removable singular
points at |omega - epsilon|, omega + epsilon (and 2 epsilon for the
first spin), which the quadrature bridges.

The ratios R1 and R2 of these general coherences to their small-t closed
forms quantify where the detuned formulas remain accurate; ``r1_map`` and
``r2_map`` tabulate them over the (omega2/omega1, t/omega1) plane.

Internally every kernel is evaluated with the four hyperbolic weights
cosh(beta*omega), cosh(beta*epsilon), sinh(beta*omega), sinh(beta*epsilon)
divided by cosh(beta*omega) + cosh(beta*epsilon).  The kernels are linear
in those four values, so this rescaling folds the partition-function
normalization into the integrand and keeps everything finite for
arbitrarily large beta, including beta = inf.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, DegenerateBasisError, DomainError
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    thermal_coth_half,
    thermal_tanh_half,
)
from .spectral import OhmicDensity, SpectralDensity
from .spin_detuned import (
    CoherenceResult,
    ModelParams,
    ThermalPoint,
    _magnitude_flags,
    coherence_integral,
)
from .table import STATUS_OK, SweepTable

# Default map axes: omega2/omega1 in [0, 10], t/omega1 in [0, 5].
MAP_OMEGA2_MAX = 10.0
MAP_T_MAX = 5.0
MAP_POINTS = 101

# Maps trade accuracy for speed; 1e-7 is far below the 1e-3 scale at
# which the ratio maps are read, and keeps cells near the omega = epsilon
# surface from chasing cancellation noise.
MAP_QUADRATURE = DEFAULT_QUADRATURE.replace(rel_tol=1e-7)

_EPS = np.finfo(float).eps

# The kernels carry a 1/(omega^2 - epsilon^2) prefactor that cancels only
# in the assembled combination.  On the surface t^2 = omega1 omega2 the
# prefactor is infinite; within this relative distance of it the coupling
# is nudged sideways instead.
_NEAR_SURFACE_GAP_RTOL = 1e-5
_COUPLING_NUDGE = 3e-5


@dataclass(frozen=True)
class SpinMixing:
    """Mixed-basis data of the pair Hamiltonian at arbitrary coupling.

    omega is the mean splitting (omega1 + omega2)/2, epsilon the mixed
    gap sqrt(t^2 + delta_omega^2/4).  The angle theta rotates the central
    two-dimensional block; z_s is the pair partition function
    2 cosh(beta omega) + 2 cosh(beta epsilon) (inf at beta = inf).
    """

    omega: float
    epsilon: float
    delta_omega: float
    cos_theta: float
    sin_theta: float
    z_s: float

    @property
    def theta(self) -> float:
        return math.atan2(self.sin_theta, self.cos_theta)

    @property
    def phi(self) -> float:
        return 0.25 * math.pi - 0.5 * self.theta

    @property
    def cos_two_theta(self) -> float:
        return (self.cos_theta - self.sin_theta) * (self.cos_theta + self.sin_theta)

    @property
    def eta(self) -> float:
        """Sign of the detuning; 0 at exact resonance."""
        if self.delta_omega == 0.0:
            return 0.0
        return math.copysign(1.0, self.delta_omega)


def _cosh_safe(x: float) -> float:
    try:
        return math.cosh(x)
    except OverflowError:
        return math.inf


def mixing(params: ModelParams, tp: ThermalPoint) -> SpinMixing:
    """Mixed-basis quantities for the given spin pair.

    Raises a degenerate-basis error at t = 0 with omega1 = omega2, where
    the rotation angle is undefined.
    """
    d = params.detuning
    if params.t == 0.0 and d == 0.0:
        raise DegenerateBasisError(
            "mixing angle undefined at t = 0 with omega1 = omega2"
        )
    r = math.hypot(2.0 * params.t, d)
    omega = 0.5 * (params.omega1 + params.omega2)
    epsilon = 0.5 * r
    z_s = 2.0 * _cosh_safe(tp.beta * omega) + 2.0 * _cosh_safe(tp.beta * epsilon)
    return SpinMixing(omega, epsilon, d, 2.0 * params.t / r, d / r, z_s)


def _scaled_weights(mix: SpinMixing, tp: ThermalPoint):
    """cosh bw, cosh be, sinh bw, sinh be, all over (cosh bw + cosh be).

    Factoring out exp(max(bw, be)) keeps the ratios exact for any beta;
    at beta = inf only the larger of omega, epsilon survives.
    """
    if tp.is_zero_temperature:
        if mix.omega > mix.epsilon:
            return 1.0, 0.0, 1.0, 0.0
        if mix.epsilon > mix.omega:
            return 0.0, 1.0, 0.0, 1.0
        return 0.5, 0.5, 0.5, 0.5
    bw = tp.beta * mix.omega
    be = tp.beta * mix.epsilon
    m = max(bw, be)
    u = math.exp(bw - m)
    v = math.exp(-bw - m)
    p = math.exp(be - m)
    q = math.exp(-be - m)
    h = u + v + p + q
    return (u + v) / h, (p + q) / h, (u - v) / h, (p - q) / h


def _g_parts(xi, cothb, omega, epsilon, chw, che, shw, she):
    """The three first-spin kernels for given hyperbolic values.

    cothb is coth(beta xi / 2) at the same xi.  With the raw hyperbolic
    values these are the printed kernels; the integral routines pass the
    values divided by cosh(beta omega) + cosh(beta epsilon), which simply
    divides the (linear) kernels by the same factor.
    """
    w2 = omega * omega
    e2 = epsilon * epsilon
    x2 = xi * xi
    d2 = (x2 - (omega + epsilon) ** 2) * (x2 - (omega - epsilon) ** 2)
    we = w2 - e2
    x2m4e = x2 - 4.0 * e2
    g0 = (-1.0 / (we * d2)) * (
        4.0 * omega * chw * ((e2 - w2) ** 2 - x2 * w2) / xi
        - 4.0 * omega * che * (
            x2 * w2 * (x2 - w2)
            + e2 * e2 * (3.0 * x2 - 4.0 * w2)
            + 2.0 * e2 * (x2 * w2 - x2 * x2 + w2 * w2)
            + 2.0 * e2 * e2 * e2
        ) / (xi * x2m4e)
        - 2.0 * cothb * (
            omega * epsilon * she * (
                -7.0 * x2 * w2 + x2 * x2 + 2.0 * w2 * w2
                + e2 * (3.0 * x2 + 8.0 * w2) - 10.0 * e2 * e2
            ) / x2m4e
            - shw * (2.0 * w2 * (x2 - w2) + e2 * (w2 - x2) + e2 * e2)
        )
    )
    g1 = (
        4.0 * epsilon * (x2 + w2 - e2) * (chw + che)
        - 4.0 * xi * cothb * (2.0 * omega * epsilon * shw + she * (x2 - w2 - e2))
    ) / (xi * d2)
    g2 = (-2.0 * epsilon / (we * d2)) * (
        -2.0 * xi * omega * epsilon * chw
        + 2.0 * che * omega * epsilon * (
            x2 * x2 + 2.0 * (w2 * w2 - 2.0 * w2 * (x2 + e2) + e2 * e2)
        ) / (xi * x2m4e)
        + cothb * (
            epsilon * shw * (x2 + w2 - e2)
            + omega * she * (
                3.0 * x2 * w2 - x2 * x2 - 2.0 * w2 * w2
                + e2 * (x2 + 8.0 * w2) - 6.0 * e2 * e2
            ) / x2m4e
        )
    )
    return g0, g1, g2


def _f_parts(xi, cothb, omega, epsilon, chw, che, shw, she):
    """The two second-spin kernels; same conventions as _g_parts."""
    w2 = omega * omega
    e2 = epsilon * epsilon
    x2 = xi * xi
    den = (w2 - e2) * (x2 - (omega - epsilon) ** 2) * (x2 - (omega + epsilon) ** 2)
    sq = (w2 - e2) ** 2 - x2 * (w2 + e2)
    f1k = (
        8.0 * epsilon * (shw / xi) * sq
        + 16.0 * xi * omega * e2 * she
        + 8.0 * epsilon * omega * cothb * (x2 - w2 + e2) * (chw - che)
    ) / den
    f2k = (
        8.0 * epsilon * (she / xi) * sq
        + 16.0 * xi * omega * e2 * shw
        + 8.0 * e2 * cothb * (x2 + w2 - e2) * (che - chw)
    ) / den
    return f1k, f2k


def _raw_weights(mix: SpinMixing, tp: ThermalPoint):
    if tp.is_zero_temperature:
        raise DomainError(
            "raw kernels diverge at T = 0; the assembled coherences handle it"
        )
    bw = tp.beta * mix.omega
    be = tp.beta * mix.epsilon
    try:
        return math.cosh(bw), math.cosh(be), math.sinh(bw), math.sinh(be)
    except OverflowError:
        raise DomainError(
            "hyperbolic overflow in the raw kernels; beta too large"
        ) from None


def _checked_xi(xi):
    arr = np.asarray(xi, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError("kernel frequency xi must be positive and finite")
    return arr


def g2_kernels(xi, mix: SpinMixing, tp: ThermalPoint):
    """First-spin kernels (g0, g1, g2) at positive xi, as printed.

    The assembled integrand is g0 + sin(theta) g1 + cos(2 theta) g2;
    removable singular points sit at |omega - epsilon|, omega + epsilon
    and 2 epsilon and are bridged by the quadrature, not here.
    """
    arr = _checked_xi(xi)
    chw, che, shw, she = _raw_weights(mix, tp)
    cothb = thermal_coth_half(tp.beta, arr)
    g0, g1, g2 = _g_parts(arr, cothb, mix.omega, mix.epsilon, chw, che, shw, she)
    if np.isscalar(xi) or np.ndim(xi) == 0:
        return float(g0), float(g1), float(g2)
    return g0, g1, g2


def f2_kernels(xi, mix: SpinMixing, tp: ThermalPoint):
    """Second-spin kernels (f1k, f2k) at positive xi, as printed.

    The assembled integrand is cos(theta) [f1k - sin(theta) f2k], with
    removable points at |omega - epsilon| and omega + epsilon.
    """
    arr = _checked_xi(xi)
    chw, che, shw, she = _raw_weights(mix, tp)
    cothb = thermal_coth_half(tp.beta, arr)
    f1k, f2k = _f_parts(arr, cothb, mix.omega, mix.epsilon, chw, che, shw, she)
    if np.isscalar(xi) or np.ndim(xi) == 0:
        return float(f1k), float(f2k)
    return f1k, f2k


def _prepared(params: ModelParams, tp: ThermalPoint, config):
    """Mixing plus an effective quadrature config for one evaluation.

    Near the surface t^2 = omega1 omega2 the 1/(omega^2 - epsilon^2)
    kernel prefactor amplifies round-off in the assembled combination;
    the achievable relative accuracy degrades like
    eps (omega / (omega - epsilon))^2.  Points within relative gap 1e-5
    of the surface are therefore nudged sideways in t (growing the gap,
    never crossing the surface), and the requested tolerance is floored
    at the noise estimate.  Both adjustments raise the
    "mixing-regularized" flag; the returned extra_rel bounds the
    relative error they introduce beyond what the quadrature's own
    estimator can see (the nudge shift plus the noise bias), so callers
    fold extra_rel * |value| into their error estimate.
    """
    cfg = DEFAULT_QUADRATURE if config is None else config
    flags = ()
    extra_rel = 0.0
    mix = mixing(params, tp)
    if params.t > 0.0 and abs(mix.omega - mix.epsilon) < _NEAR_SURFACE_GAP_RTOL * mix.omega:
        bump = _COUPLING_NUDGE if mix.epsilon >= mix.omega else -_COUPLING_NUDGE
        params = replace(params, t=params.t * (1.0 + bump))
        mix = mixing(params, tp)
        flags = ("mixing-regularized",)
        extra_rel = 3.0 * _COUPLING_NUDGE
    gap_rel = abs(mix.omega - mix.epsilon) / mix.omega
    if gap_rel > 0.0:
        noise = 5.0 * _EPS / (gap_rel * gap_rel)
        floor = min(noise, 1e-4)
        if floor > cfg.rel_tol:
            cfg = cfg.replace(rel_tol=floor)
            flags = ("mixing-regularized",)
            extra_rel += floor
    return params, mix, cfg, flags, extra_rel


def sigma1x_general(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> CoherenceResult:
    """First-spin coherence at arbitrary coupling t."""
    params, mix, cfg, flags, extra_rel = _prepared(params, tp, config)
    weights = _scaled_weights(mix, tp)
    beta = tp.beta
    omega, epsilon = mix.omega, mix.epsilon
    sin_t, cos2t = mix.sin_theta, mix.cos_two_theta

    def kernel(xi):
        cothb = thermal_coth_half(beta, xi)
        g0, g1, g2 = _g_parts(xi, cothb, omega, epsilon, *weights)
        return g0 + sin_t * g1 + cos2t * g2

    removable = (abs(omega - epsilon), omega + epsilon, 2.0 * epsilon)
    val, err = sd.weighted_integral(kernel, removable, cfg)
    pre = params.f1 * params.f2
    value = pre * val
    err_total = abs(pre) * err + extra_rel * abs(value)
    return CoherenceResult(
        value, err_total, "general_mixed_basis", flags + _magnitude_flags(value)
    )


def sigma2x_general(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> CoherenceResult:
    """Second-spin coherence at arbitrary coupling t.

    Exactly zero at t = 0: the prefactor cos(theta) epsilon equals t.
    """
    mixing(params, tp)  # surface the degenerate-basis error first
    if params.t == 0.0:
        return CoherenceResult(0.0, 0.0, "general_mixed_basis", ())
    params, mix, cfg, flags, extra_rel = _prepared(params, tp, config)
    val, err = _second_spin_integral(params, sd, tp, mix, cfg)
    pre = 0.5 * params.f1 * params.f2 * mix.cos_theta
    value = pre * val
    err_total = abs(pre) * err + extra_rel * abs(value)
    return CoherenceResult(
        value, err_total, "general_mixed_basis", flags + _magnitude_flags(value)
    )


def _second_spin_integral(params, sd, tp, mix, cfg):
    """Integral of I(xi) [f1k - sin(theta) f2k] with scaled weights."""
    weights = _scaled_weights(mix, tp)
    beta = tp.beta
    omega, epsilon = mix.omega, mix.epsilon
    sin_t = mix.sin_theta

    def kernel(xi):
        cothb = thermal_coth_half(beta, xi)
        f1k, f2k = _f_parts(xi, cothb, omega, epsilon, *weights)
        return f1k - sin_t * f2k

    removable = (abs(omega - epsilon), omega + epsilon)
    return sd.weighted_integral(kernel, removable, cfg)


def _r1_core(params, sd, tp, config, j_val, j_err):
    """R1 from a precomputed small-t reference integral."""
    params, mix, cfg, flags, extra_rel = _prepared(params, tp, config)
    weights = _scaled_weights(mix, tp)
    beta = tp.beta
    omega, epsilon = mix.omega, mix.epsilon
    sin_t, cos2t = mix.sin_theta, mix.cos_two_theta

    def kernel(xi):
        cothb = thermal_coth_half(beta, xi)
        g0, g1, g2 = _g_parts(xi, cothb, omega, epsilon, *weights)
        return g0 + sin_t * g1 + cos2t * g2

    removable = (abs(omega - epsilon), omega + epsilon, 2.0 * epsilon)
    num, num_err = sd.weighted_integral(kernel, removable, cfg)
    th1 = thermal_tanh_half(tp.beta, params.omega1)
    den = -4.0 * th1 * j_val
    if den == 0.0:
        raise DomainError("small-t reference coherence vanishes; R1 undefined")
    value = num / den
    err = (num_err + abs(value) * 4.0 * abs(th1) * j_err) / abs(den)
    err += extra_rel * abs(value)
    return CoherenceResult(value, err, "ratio_r1", flags)


def _r2_core(params, sd, tp, config, j_val, j_err):
    """R2 from a precomputed small-t reference integral.

    The cos(theta)/t prefactor is evaluated as 2/hypot(2t, delta_omega),
    which stays finite on the whole t = 0 edge.
    """
    params, mix, cfg, flags, extra_rel = _prepared(params, tp, config)
    num, num_err = _second_spin_integral(params, sd, tp, mix, cfg)
    cos_over_t = 2.0 / math.hypot(2.0 * params.t, params.detuning)
    th1 = thermal_tanh_half(tp.beta, params.omega1)
    th2 = thermal_tanh_half(tp.beta, params.omega2)
    den = 8.0 * th2 * th1 * j_val
    if den == 0.0:
        raise DomainError("small-t reference coherence vanishes; R2 undefined")
    value = params.omega2 * cos_over_t * num / den
    err = abs(params.omega2 * cos_over_t / den) * num_err + abs(
        value / j_val
    ) * j_err
    err += extra_rel * abs(value)
    return CoherenceResult(value, err, "ratio_r2", flags)


def r1_value(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> CoherenceResult:
    """Ratio of the general first-spin coherence to its small-t form.

    The coupling weights f1, f2 cancel; the result depends on omega1,
    omega2, t, the bath, and the temperature only.
    """
    j_val, j_err = coherence_integral(params, sd, tp, config)
    return _r1_core(params, sd, tp, config, j_val, j_err)


def r2_value(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> CoherenceResult:
    """Ratio of the general second-spin coherence to its small-t form.

    Finite on the whole t = 0 edge (away from omega1 = omega2), where it
    tends to 1 by construction.
    """
    j_val, j_err = coherence_integral(params, sd, tp, config)
    return _r2_core(params, sd, tp, config, j_val, j_err)


# ---------------------------------------------------------------------------
# Validity maps
# ---------------------------------------------------------------------------

def _ratio_cell(task):
    """One map cell; returns (value, err, status). Picklable for pools."""
    which, w2r, tr, cutoff, beta, j_val, j_err, cfg = task
    try:
        params = ModelParams(1.0, w2r, tr, 1.0, 1.0)  # f1, f2 cancel in the ratio
        tp = ThermalPoint(beta)
        sd = OhmicDensity(1.0, cutoff)
        core = _r1_core if which == "r1" else _r2_core
        res = core(params, sd, tp, cfg, j_val, j_err)
        return res.value, res.err_estimate, ";".join(res.flags) or STATUS_OK
    except DegenerateBasisError:
        return None, None, "degenerate-basis"
    except DomainError:
        return None, None, "invalid-params"
    except ConvergenceError:
        return None, None, "no-convergence"


def _ratio_map(which, omega2_over_omega1, t_over_omega1, omega1_over_omegac,
               beta_omega1, config, jobs):
    if not (omega1_over_omegac > 0.0):
        raise DomainError("omega1_over_omegac must be positive")
    w2 = (
        np.linspace(0.0, MAP_OMEGA2_MAX, MAP_POINTS)
        if omega2_over_omega1 is None
        else np.asarray(omega2_over_omega1, dtype=float)
    )
    ts = (
        np.linspace(0.0, MAP_T_MAX, MAP_POINTS)
        if t_over_omega1 is None
        else np.asarray(t_over_omega1, dtype=float)
    )
    cutoff = 1.0 / omega1_over_omegac
    tp = ThermalPoint.from_beta_omega1(beta_omega1, 1.0)
    sd = OhmicDensity(1.0, cutoff)
    cfg = MAP_QUADRATURE if config is None else config
    # The small-t reference integral depends only on omega1 = 1, the bath
    # and the temperature, so it is shared by every cell.
    ref_params = ModelParams(1.0, 2.0, 0.0, 1.0, 1.0)
    j_val, j_err = coherence_integral(ref_params, sd, tp, cfg)
    tasks = [
        (which, float(a), float(b), cutoff, tp.beta, j_val, j_err, cfg)
        for a in w2
        for b in ts
    ]
    if jobs is not None and jobs > 1:
        chunk = max(1, len(tasks) // (8 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_ratio_cell, tasks, chunksize=chunk))
    else:
        cells = [_ratio_cell(t) for t in tasks]
    rows = [
        (task[1], task[2], val, err, status)
        for task, (val, err, status) in zip(tasks, cells)
    ]
    meta = {
        "map": which,
        "omega1_over_omegac": repr(float(omega1_over_omegac)),
        "beta_omega1": repr(float(beta_omega1)),
        "grid": "%d x %d" % (len(w2), len(ts)),
    }
    return SweepTable(
        ("omega2_over_omega1", "t_over_omega1", which, "err_estimate", "status"),
        rows,
        meta,
    )


def r1_map(
    omega1_over_omegac: float,
    beta_omega1: float,
    omega2_over_omega1=None,
    t_over_omega1=None,
    config: QuadratureConfig | None = None,
    jobs: int | None = None,
) -> SweepTable:
    """Map of R1 over the (omega2/omega1, t/omega1) plane, ohmic bath.

    Cells where the ratio is undefined (omega2 = 0, or the degenerate
    t = 0, omega1 = omega2 corner) are flagged, not failed.
    """
    return _ratio_map("r1", omega2_over_omega1, t_over_omega1,
                      omega1_over_omegac, beta_omega1, config, jobs)


def r2_map(
    omega1_over_omegac: float,
    beta_omega1: float,
    omega2_over_omega1=None,
    t_over_omega1=None,
    config: QuadratureConfig | None = None,
    jobs: int | None = None,
) -> SweepTable:
    """Map of R2 over the (omega2/omega1, t/omega1) plane, ohmic bath."""
    return _ratio_map("r2", omega2_over_omega1, t_over_omega1,
                      omega1_over_omegac, beta_omega1, config, jobs)
