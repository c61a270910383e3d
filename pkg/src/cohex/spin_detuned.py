"""Steady-state coherences of two detuned spins sharing a bosonic bath.

Second-order perturbation theory in the system--bath coupling gives every
coherence here as a prefactor times one shared bath integral

    J = integral I(xi) [xi coth(beta xi/2) - omega1 coth(beta omega1/2)]
                 / [xi (xi^2 - omega1^2)] dxi

with a removable point at xi = omega1.  Both spin coherences are built from
the same J evaluation, so their exact proportionality

    <sigma2x> = -(t/omega2) tanh(beta omega2/2) <sigma1x>

holds to machine precision by construction, for any bath.  Zero temperature
is a separate analytic path where the kernel collapses to
1/[xi (xi + omega1)] and the singular point disappears.

Conventions: hbar = k_B = 1; beta = +inf encodes T = 0; f1, f2 are the
dimensionless longitudinal/transverse bath-coupling weights of the first
spin; t couples the two spins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    _exp_scaled_ei_neg,
    coth_minus_inv,
    integrate_semi_infinite,
    thermal_tanh_half,
)
from .spectral import OhmicDensity, SpectralDensity

# Advisory thresholds (flags only, never hard errors): the detuned formulas
# assume t small against every level splitting; the asymptotic forms assume
# clearly low or high temperature; perturbative values should stay small.
DETUNED_COUPLING_FACTOR = 0.2
LOW_T_MIN_BETA_OMEGA1 = 5.0
HIGH_T_MAX_BETA_OMEGA1 = 0.2
STATIC_VALIDITY_FACTOR = 0.1
PERTURBATIVE_MAGNITUDE = 0.1


@dataclass(frozen=True)
class ModelParams:
    """Energies of the two spins, their coupling, and the bath weights."""

    omega1: float
    omega2: float
    t: float
    f1: float
    f2: float

    def __post_init__(self):
        for name in ("omega1", "omega2"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise DomainError(f"{name} must be positive and finite")
        if self.t < 0.0 or not math.isfinite(self.t):
            raise DomainError("t must be non-negative and finite")
        for name in ("f1", "f2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def detuning(self) -> float:
        """omega1 - omega2 (signed)."""
        return self.omega1 - self.omega2


@dataclass(frozen=True)
class ThermalPoint:
    """Inverse temperature; beta = +inf encodes T = 0."""

    beta: float

    def __post_init__(self):
        if not (self.beta > 0.0):
            raise DomainError("beta must be positive (inf allowed for T = 0)")

    @classmethod
    def from_beta_omega1(cls, beta_omega1: float, omega1: float) -> "ThermalPoint":
        if beta_omega1 == math.inf:
            return cls(math.inf)
        return cls(beta_omega1 / omega1)

    @classmethod
    def from_T_over_omega1(cls, t_rel: float, omega1: float) -> "ThermalPoint":
        if t_rel < 0.0:
            raise DomainError("temperature must be non-negative")
        if t_rel == 0.0:
            return cls(math.inf)
        return cls(1.0 / (t_rel * omega1))

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def beta_omega1(self, omega1: float) -> float:
        return self.beta * omega1


@dataclass(frozen=True)
class CoherenceResult:
    """A computed coherence with its numeric error and advisory flags."""

    value: float
    err_estimate: float
    method: str
    flags: tuple = field(default_factory=tuple)


def detuned_validity_flags(params: ModelParams) -> tuple:
    """Advisory flags for using the detuned (small-t) formulas."""
    scales = [params.omega1, params.omega2]
    if params.detuning != 0.0:
        scales.append(abs(params.detuning))
    if params.t >= DETUNED_COUPLING_FACTOR * min(scales):
        return ("detuned-coupling",)
    return ()


def _magnitude_flags(value: float) -> tuple:
    if abs(value) > PERTURBATIVE_MAGNITUDE:
        return ("perturbative-magnitude",)
    return ()


def coherence_integral(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
):
    """The shared integral J; returns (value, err_estimate).

    All detuned coherences are proportional to this one number, which is
    why the transfer relation between the two spins is exact here.
    """
    w1 = params.omega1
    if tp.is_zero_temperature:

        def kernel_zero(xi):
            return 1.0 / (xi * (xi + w1))

        return sd.weighted_integral(kernel_zero, (), config)

    beta = tp.beta
    # xi coth(beta xi/2) - w1 coth(beta w1/2) with the common 2/beta part
    # removed analytically; essential at high temperature.
    anchor = w1 * coth_minus_inv(0.5 * beta * w1)

    def kernel(xi):
        num = xi * coth_minus_inv(0.5 * beta * xi) - anchor
        return num / (xi * (xi * xi - w1 * w1))

    return sd.weighted_integral(kernel, (w1,), config)


def sigma1x(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> CoherenceResult:
    """<sigma1x> at temperature 1/beta: -4 f1 f2 tanh(beta omega1/2) J."""
    flags = detuned_validity_flags(params)
    pre = -4.0 * params.f1 * params.f2 * thermal_tanh_half(tp.beta, params.omega1)
    if pre == 0.0:
        return CoherenceResult(0.0, 0.0, "full", flags)
    j, err = coherence_integral(params, sd, tp, config)
    value = pre * j
    return CoherenceResult(
        value, abs(pre) * err, "full", flags + _magnitude_flags(value)
    )


def sigma2x(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> CoherenceResult:
    """<sigma2x>: the first spin's coherence transferred through t.

    Computed as -(t/omega2) tanh(beta omega2/2) * sigma1x, sharing the
    identical J evaluation, so the proportionality is structural rather
    than a numerical coincidence.
    """
    first = sigma1x(params, sd, tp, config)
    factor = -(params.t / params.omega2) * thermal_tanh_half(tp.beta, params.omega2)
    value = factor * first.value
    return CoherenceResult(
        value,
        abs(factor) * first.err_estimate,
        "full",
        detuned_validity_flags(params) + _magnitude_flags(value),
    )


def sigma2y(params: ModelParams, sd: SpectralDensity, tp: ThermalPoint) -> CoherenceResult:
    """<sigma2y> vanishes identically in the steady state."""
    return CoherenceResult(0.0, 0.0, "full", ())


def f_dimensionless(
    omega1_over_omegac: float,
    beta_omega1: float,
    config: QuadratureConfig | None = None,
) -> float:
    """The dimensionless ohmic shape factor F(omega1/omegac, beta omega1).

    F = integral_0^inf e^{-(omega1/omegac) x}
        [x coth(beta omega1 x/2) - coth(beta omega1/2)] / (x^2 - 1) dx,

    removable at x = 1.  At beta omega1 = +inf it reduces to
    -e^{omega1/omegac} Ei(-omega1/omegac).  Positive, and grows as the
    temperature drops.
    """
    a = float(omega1_over_omegac)
    b = float(beta_omega1)
    if not (a > 0.0) or not math.isfinite(a):
        raise DomainError("omega1_over_omegac must be positive and finite")
    if not (b > 0.0):
        raise DomainError("beta_omega1 must be positive (inf allowed)")
    if math.isinf(b):
        return -_exp_scaled_ei_neg(a)

    anchor = coth_minus_inv(0.5 * b)

    def kernel(x):
        num = x * coth_minus_inv(0.5 * b * x) - anchor
        return np.exp(-a * x) * num / (x * x - 1.0)

    cfg = config or DEFAULT_QUADRATURE
    cfg = cfg.replace(tail_decay_scale=max(1.0 / a, 1.0))
    value, _ = integrate_semi_infinite(kernel, (1.0,), cfg)
    return value


def sigma2x_low_T(
    params: ModelParams,
    coupling: float,
    cutoff: float,
    tp: ThermalPoint,
) -> CoherenceResult:
    """Low-temperature closed form of <sigma2x> for the ohmic bath.

    (4 A f1 f2 t / omega2) tanh(beta omega2/2) tanh(beta omega1/2)
        [-e^{omega1/omegac} Ei(-omega1/omegac) - pi^2/(3 (beta omega1)^2)].

    The second bracket term is the leading thermal correction; the overall
    tanh(beta omega1/2) keeps the approximation within a few percent down
    to beta omega1 ~ 2.5.
    """
    a = params.omega1 / cutoff
    bracket = -_exp_scaled_ei_neg(a)
    flags = ()
    if not tp.is_zero_temperature:
        b = tp.beta_omega1(params.omega1)
        bracket -= math.pi ** 2 / (3.0 * b * b)
        if b < LOW_T_MIN_BETA_OMEGA1:
            flags = ("low-T-advisory",)
    value = (
        4.0 * coupling * params.f1 * params.f2 * params.t / params.omega2
        * thermal_tanh_half(tp.beta, params.omega2)
        * thermal_tanh_half(tp.beta, params.omega1)
        * bracket
    )
    return CoherenceResult(value, 0.0, "low_T_asymptotic", flags)


def high_T_asymptotes(
    params: ModelParams, sd: SpectralDensity, tp: ThermalPoint
):
    """Leading high-temperature forms of both coherences (any bath).

    Only the reorganization scale Omega = integral I/xi survives:
    sigma1x ~ -f1 f2 (Omega/3 omega1) (beta omega1)^2 and
    sigma2x ~ +f1 f2 t Omega omega1 beta^3 / 6.
    """
    if tp.is_zero_temperature:
        raise DomainError("high-temperature asymptote is meaningless at T = 0")
    omega = sd.reorganization_omega()
    b = tp.beta_omega1(params.omega1)
    s1 = -params.f1 * params.f2 * (omega / (3.0 * params.omega1)) * b * b
    s2 = (params.f1 * params.f2 * params.t / params.omega1) * (
        omega / (6.0 * params.omega1)
    ) * b ** 3
    return s1, s2


class StaticChain(tuple):
    """The four mean-field steps: spin polarization, per-mode bath shift
    coefficient, back-shifted first-spin coherence, transferred output."""

    __slots__ = ()

    def __new__(cls, sigma1z_st, boson_shift_coeff, sigma1x_st, sigma2x_st):
        return super().__new__(
            cls, (sigma1z_st, boson_shift_coeff, sigma1x_st, sigma2x_st)
        )

    @property
    def sigma1z_st(self):
        return self[0]

    @property
    def boson_shift_coeff(self):
        return self[1]

    @property
    def sigma1x_st(self):
        return self[2]

    @property
    def sigma2x_st(self):
        return self[3]


def static_chain(
    params: ModelParams, sd: SpectralDensity, tp: ThermalPoint
) -> StaticChain:
    """Mean-field chain ignoring back-action dynamics.

    The thermalized first spin polarizes the bath, the shifted bath tilts
    the first spin, and the tilt transfers to the second spin.  Every step
    is closed-form; the bath enters only through Omega.
    """
    omega = sd.reorganization_omega()
    s1z = -thermal_tanh_half(tp.beta, params.omega1)
    shift_coeff = -2.0 * params.f1 * s1z
    s1x = -4.0 * params.f1 * params.f2 * s1z * s1z * omega / params.omega1
    s2x = -(params.t / params.omega2) * thermal_tanh_half(tp.beta, params.omega2) * s1x
    return StaticChain(s1z, shift_coeff, s1x, s2x)


def static_chain_flags(params: ModelParams, sd: SpectralDensity, tp: ThermalPoint) -> tuple:
    """Advisory flags for the static chain's weak-coupling assumptions."""
    omega = sd.reorganization_omega()
    chain = static_chain(params, sd, tp)
    flags = []
    if 4.0 * abs(params.f1 * params.f2) * omega > STATIC_VALIDITY_FACTOR * params.omega1:
        flags.append("static-bath-coupling")
    if params.t * abs(chain.sigma1x_st) > STATIC_VALIDITY_FACTOR * params.omega2:
        flags.append("static-spin-coupling")
    return tuple(flags)


def static_dynamical_split(
    params: ModelParams,
    sd: SpectralDensity,
    config: QuadratureConfig | None = None,
):
    """Zero-temperature <sigma2x> split into its two competing pieces.

    static_term = 4 f1 f2 t Omega/(omega1 omega2) is bath-shape-blind;
    dynamical_term = -(4 f1 f2 t/(omega1 omega2)) integral I/(xi + omega1)
    carries the back-action and is always <= 0, so the static term alone is
    an upper bound on the true zero-temperature value.
    """
    pre = 4.0 * params.f1 * params.f2 * params.t / (params.omega1 * params.omega2)
    omega = sd.reorganization_omega()
    static_term = pre * omega
    if omega == 0.0:
        return static_term, 0.0
    integral, _ = sd.weighted_integral(lambda xi: 1.0 / (xi + params.omega1), (), config)
    return static_term, -pre * integral


def normalized_output_ratio(
    params: ModelParams,
    sd: SpectralDensity,
    tp: ThermalPoint,
    config: QuadratureConfig | None = None,
) -> float:
    """(omega1/t) <sigma2x>_T / <sigma1x>_{T=0} for the ohmic bath.

    Couplings cancel, leaving
    (omega1/omega2) tanh(beta omega2/2) tanh(beta omega1/2)
        F(a, b) / (e^a Ei(-a)),  a = omega1/omegac.
    Negative at all T; magnitude 1 at T = 0 when omega2 = omega1, and
    falling off as T^{-3} at high temperature.
    """
    if not isinstance(sd, OhmicDensity):
        raise DomainError("the normalized output ratio uses the ohmic closed form")
    a = params.omega1 / sd.cutoff
    b = tp.beta_omega1(params.omega1)
    f_val = f_dimensionless(a, b, config)
    return (
        (params.omega1 / params.omega2)
        * thermal_tanh_half(tp.beta, params.omega2)
        * thermal_tanh_half(tp.beta, params.omega1)
        * f_val
        / _exp_scaled_ei_neg(a)
    )


def normalized_coherences_spin(
    omega1_over_omegac: float,
    beta_omega1: float,
    omega2_over_omega1: float = 3.0,
    config: QuadratureConfig | None = None,
):
    """<sigma_jx>_T / <sigma_jx>_{T=0} for the ohmic bath, j = 1, 2.

    Both are ratios of the shape factor F to its zero-temperature value,
    weighted by the thermal polarization factors; both increase
    monotonically as the temperature drops and reach 1 at T = 0.
    """
    a = float(omega1_over_omegac)
    b = float(beta_omega1)
    f_val = f_dimensionless(a, b, config)
    f_zero = -_exp_scaled_ei_neg(a)
    tanh1 = thermal_tanh_half(b, 1.0)
    tanh2 = thermal_tanh_half(b, float(omega2_over_omega1))
    n1 = tanh1 * f_val / f_zero
    return n1, tanh2 * n1
