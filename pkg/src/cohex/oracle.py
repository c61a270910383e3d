"""Exact diagonalization of desk-scale spin-boson and fermion-boson models.

Dense truncated Hamiltonians over a finite discrete bath give
non-perturbative thermal averages against which every closed-form
coherence in the package can be checked.  The check is quantitative:
the relative deviation between formula and exact value must shrink
quadratically when both bath couplings are rescaled, because the
formulas are second order in f1, f2 and the first neglected
contribution is fourth order.

Matrices are dense on purpose.  At the guarded sizes the
eigendecomposition dominates anyway, and dense construction keeps the
Hamiltonian manifestly Hermitian: every term is either symmetric by
construction or added together with its exact transpose, so
``max|H - H^dagger|`` is identically zero, not merely small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    EigensolverError,
    HermiticityError,
    OracleSizeError,
)
from .numerics import thermal_tanh_half
from .spectral import DiscreteDensity
from .spin_detuned import ModelParams, ThermalPoint, sigma1x, sigma2x, sigma2y
from .fermion import sigma1x_fermion, sigma2x_fermion

DIMENSION_GUARD = 20000
SPIN_OBSERVABLES = ("sigma1x", "sigma2x", "sigma1z", "sigma2z", "sigma2y")
FERMION_OBSERVABLES = ("fermion_coh1", "fermion_coh2")
OBSERVABLES = SPIN_OBSERVABLES + FERMION_OBSERVABLES

_CUTOFF_STABILITY_ABS = 1e-8
_IMAG_RESIDUE_ABS = 1e-10

_I2 = np.eye(2)
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SZ = np.diag([1.0, -1.0])
_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]])  # sigma-: |up> -> |down>

_S1X = np.kron(_SX, _I2)
_S1Z = np.kron(_SZ, _I2)
_S2X = np.kron(_I2, _SX)
_S2Y = np.kron(_I2, _SY)
_S2Z = np.kron(_I2, _SZ)
_HOP = np.kron(_LOWER.T, _I2) @ np.kron(_I2, _LOWER)  # sigma1+ sigma2-


def _kron_chain(factors):
    return reduce(np.kron, factors)


def _jw_modes():
    """Three fermion annihilators on an 8-dimensional space.

    The auxiliary mode a0 carries no energy of its own; a1 and a2 carry
    the level energies.  Jordan-Wigner strings make the trio
    anticommute exactly: a0 = s- x 1 x 1, a1 = Z x s- x 1,
    a2 = Z x Z x s-, with s- annihilating the filled state.
    """
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])  # annihilator, n = diag(0, 1)
    a0 = _kron_chain((sm, _I2, _I2))
    a1 = _kron_chain((_SZ, sm, _I2))
    a2 = _kron_chain((_SZ, _SZ, sm))
    return a0, a1, a2


_A0, _A1, _A2 = _jw_modes()


@dataclass(frozen=True)
class OracleSpec:
    """One exact-diagonalization run: bath, truncation, model, state.

    The bath must be a DiscreteDensity with 1 to 3 modes; fock_cutoff is
    the largest boson occupancy kept per mode.  The total Hilbert
    dimension, 4 (spin) or 8 (fermion) times (fock_cutoff + 1) per
    mode, is capped at a desk-scale guard because the dense
    eigendecomposition is the whole point of this module.
    """

    bath: DiscreteDensity
    fock_cutoff: int
    model: str  # "spin" or "fermion"
    params: ModelParams
    beta: float

    def __post_init__(self):
        if not isinstance(self.bath, DiscreteDensity):
            raise DomainError(
                "the oracle needs a bath with finitely many modes "
                "(DiscreteDensity)"
            )
        if not 1 <= self.n_modes <= 3:
            raise DomainError("the oracle bath must have 1 to 3 modes")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise DomainError("fock_cutoff must be an integer >= 1")
        if self.model not in ("spin", "fermion"):
            raise DomainError("model must be 'spin' or 'fermion'")
        if not (self.beta > 0.0) or not math.isfinite(self.beta):
            raise DomainError(
                "beta must be positive and finite: the truncated trace "
                "has no zero-temperature limit to offer"
            )
        if self.dimension > DIMENSION_GUARD:
            raise OracleSizeError(
                f"Hilbert dimension {self.dimension} exceeds the "
                f"desk-scale guard {DIMENSION_GUARD}"
            )

    @property
    def n_modes(self) -> int:
        return int(self.bath.frequencies.size)

    @property
    def dimension(self) -> int:
        system = 4 if self.model == "spin" else 8
        return system * (int(self.fock_cutoff) + 1) ** self.n_modes


def _bath_matrices(bath: DiscreteDensity, fock_cutoff: int):
    """(H_B, coupling operator) on the joint truncated boson space.

    H_B = sum_k Omega_k b_k^dagger b_k and the coupling operator is
    sum_k lambda_k (b_k + b_k^dagger).
    """
    d = int(fock_cutoff) + 1
    ladder = np.diag(np.sqrt(np.arange(1.0, d)), 1)
    number = np.diag(np.arange(d, dtype=float))
    position = ladder + ladder.T
    eye = np.eye(d)
    n_modes = bath.frequencies.size
    dim = d ** n_modes
    h_b = np.zeros((dim, dim))
    coupling_op = np.zeros((dim, dim))
    for k in range(n_modes):
        factors_n = [eye] * n_modes
        factors_x = [eye] * n_modes
        factors_n[k] = number
        factors_x[k] = position
        h_b += bath.frequencies[k] * _kron_chain(factors_n)
        coupling_op += bath.couplings[k] * _kron_chain(factors_x)
    return h_b, coupling_op


def _two_spin_hamiltonian(params: ModelParams) -> np.ndarray:
    """The bare 4x4 two-spin block: level terms plus the t hopping."""
    return (
        0.5 * params.omega1 * _S1Z
        + 0.5 * params.omega2 * _S2Z
        + params.t * (_HOP + _HOP.T)
    )


def _fermion_system(params: ModelParams):
    """(system Hamiltonian, bath-coupling operator) on the 8-dim space.

    The printed sign conventions of the fermionized model are built in:
    the hopping enters as -t and the auxiliary-level coupling as -f2,
    which is what makes this Hamiltonian the image of the spin model at
    the same positive parameters.
    """
    n1 = _A1.T @ _A1
    n2 = _A2.T @ _A2
    hop = _A1.T @ _A2
    mix = _A1.T @ _A0
    h_sys = (
        params.omega1 * n1
        + params.omega2 * n2
        - params.t * (hop + hop.T)
    )
    c_sys = 2.0 * params.f1 * n1 - params.f2 * (mix + mix.T)
    return h_sys, c_sys


def build_hamiltonian(spec: OracleSpec) -> np.ndarray:
    """Dense Hamiltonian of the truncated model, exactly Hermitian.

    H = H_system x 1 + 1 x H_bath + C_system x sum_k lambda_k (b_k +
    b_k^dagger), with the spin system (f1 sigma1z + f2 sigma1x) or the
    fermion system (2 f1 n1 - f2 (a1^dagger a0 + a0^dagger a1)) in the
    coupling slot.
    """
    h_b, coupling_op = _bath_matrices(spec.bath, spec.fock_cutoff)
    if spec.model == "spin":
        h_sys = _two_spin_hamiltonian(spec.params)
        c_sys = spec.params.f1 * _S1Z + spec.params.f2 * _S1X
    else:
        h_sys, c_sys = _fermion_system(spec.params)
    eye_sys = np.eye(h_sys.shape[0])
    eye_b = np.eye(h_b.shape[0])
    return (
        np.kron(h_sys, eye_b)
        + np.kron(eye_sys, h_b)
        + np.kron(c_sys, coupling_op)
    )


def _check_observable(spec: OracleSpec, observable: str) -> None:
    if observable not in OBSERVABLES:
        raise DomainError(
            f"unknown observable '{observable}'; valid ids: "
            + ", ".join(OBSERVABLES)
        )
    needed = "fermion" if observable in FERMION_OBSERVABLES else "spin"
    if spec.model != needed:
        raise DomainError(
            f"observable '{observable}' belongs to the {needed} model, "
            f"not '{spec.model}'"
        )


def observable_matrix(spec: OracleSpec, observable: str) -> np.ndarray:
    """The named observable on the full system x bath space."""
    _check_observable(spec, observable)
    if observable == "fermion_coh1":
        mix = _A1.T @ _A0
        sys_op = -(mix + mix.T)
    elif observable == "fermion_coh2":
        mix = _A2.T @ _A0
        sys_op = -(mix + mix.T)
    else:
        sys_op = {
            "sigma1x": _S1X,
            "sigma2x": _S2X,
            "sigma1z": _S1Z,
            "sigma2z": _S2Z,
            "sigma2y": _S2Y,
        }[observable]
    d = (int(spec.fock_cutoff) + 1) ** spec.n_modes
    return np.kron(sys_op, np.eye(d))


def thermal_average(h: np.ndarray, observable: np.ndarray, beta: float) -> float:
    """Tr[e^(-beta H) O] / Tr[e^(-beta H)] by full eigendecomposition.

    The ground energy is subtracted before exponentiating so large beta
    never overflows.  The result must be real; an imaginary residue
    beyond 1e-10 means a non-Hermitian observable slipped in.
    """
    if not (beta > 0.0) or not math.isfinite(beta):
        raise DomainError("thermal_average needs finite beta > 0")
    if not np.array_equal(h, h.conj().T):
        raise HermiticityError("the Hamiltonian is not exactly Hermitian")
    try:
        energies, states = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"dense eigensolver failed: {exc}") from exc
    weights = np.exp(-beta * (energies - energies[0]))
    diagonal = np.einsum(
        "in,ij,jn->n", states.conj(), observable, states, optimize=True
    )
    value = complex(np.sum(weights * diagonal) / np.sum(weights))
    if abs(value.imag) > _IMAG_RESIDUE_ABS:
        raise HermiticityError(
            f"thermal average has imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def exact_average(spec: OracleSpec, observable: str) -> float:
    """Exact thermal average of one named observable for this spec."""
    h = build_hamiltonian(spec)
    obs = observable_matrix(spec, observable)
    return thermal_average(h, obs, spec.beta)


def _stable_exact(spec: OracleSpec, observable: str):
    """(value, truncation shift) with a cutoff-doubling stability check.

    The bath truncation is this module's own approximation; a value is
    only admitted into a comparison after doubling the cutoff moves it
    by less than 1e-8.  The doubled-cutoff value is the one returned.
    """
    base = exact_average(spec, observable)
    refined = exact_average(
        replace(spec, fock_cutoff=2 * int(spec.fock_cutoff)), observable
    )
    shift = abs(refined - base)
    if shift >= _CUTOFF_STABILITY_ABS:
        raise ConvergenceError(
            f"exact value moves by {shift:.2e} when the boson cutoff "
            "doubles; raise fock_cutoff",
            partial=refined,
            err_estimate=shift,
        )
    return refined, shift


def formula_value(spec: OracleSpec, observable: str) -> float:
    """The closed-form counterpart evaluated on the same discrete bath.

    Coherences use the second-order formulas of the spin and fermion
    modules.  The z observables use the bath-free hybridized two-level
    thermal value, exact at f1 = f2 = 0, so their measured deviation is
    purely the bath correction.
    """
    _check_observable(spec, observable)
    tp = ThermalPoint(spec.beta)
    p = spec.params
    if observable == "sigma1x":
        return sigma1x(p, spec.bath, tp).value
    if observable == "sigma2x":
        return sigma2x(p, spec.bath, tp).value
    if observable == "sigma2y":
        return sigma2y(p, spec.bath, tp).value
    if observable == "fermion_coh1":
        return sigma1x_fermion(p, spec.bath, tp).value
    if observable == "fermion_coh2":
        return sigma2x_fermion(p, spec.bath, tp).value
    h12 = _two_spin_hamiltonian(p)
    sys_op = _S1Z if observable == "sigma1z" else _S2Z
    return thermal_average(h12, sys_op, spec.beta)


def compare_perturbative(spec: OracleSpec, observable: str):
    """(exact, formula, rel_dev) for one observable.

    The exact side passes the cutoff-doubling stability check first.
    rel_dev is |exact - formula| over the larger magnitude, 0 when both
    vanish.  The formulas are trustworthy when the dimensionless
    coupling 4 f1 f2 Omega is well below omega1; no error is raised
    outside that regime, the deviation simply grows.
    """
    exact, _ = _stable_exact(spec, observable)
    formula = formula_value(spec, observable)
    scale = max(abs(exact), abs(formula))
    rel_dev = abs(exact - formula) / scale if scale > 0.0 else 0.0
    return exact, formula, rel_dev


@dataclass(frozen=True)
class ConvergenceFit:
    """Fitted convergence order with the underlying data.

    inconclusive is set when the deviations fail to shrink monotonically
    as the couplings shrink (usually a truncation- or rounding-limited
    comparison); the data are still returned for inspection.
    """

    order: float
    scales: tuple
    deviations: tuple
    inconclusive: bool


def convergence_order(
    spec: OracleSpec,
    observable: str,
    scale_factors=(1.0, 0.5, 0.25),
) -> ConvergenceFit:
    """Fit the order of formula/exact agreement under coupling rescaling.

    Both f1 and f2 are multiplied by each scale factor s, so the
    coherences scale as s^2 and the first neglected term as s^4: the
    relative deviation must fall as s^2 and the fitted log-log slope
    should sit near 2.
    """
    factors = sorted((float(s) for s in scale_factors), reverse=True)
    if len(factors) < 2:
        raise DomainError("need at least two scale factors to fit a slope")
    if factors[-1] <= 0.0:
        raise DomainError(
            "scale factors must be positive: at s = 0 both sides vanish "
            "and the relative deviation is 0/0"
        )
    deviations = []
    for s in factors:
        scaled_params = replace(
            spec.params, f1=s * spec.params.f1, f2=s * spec.params.f2
        )
        scaled = replace(spec, params=scaled_params)
        _, _, rel_dev = compare_perturbative(scaled, observable)
        deviations.append(rel_dev)
    if min(deviations) <= 0.0:
        return ConvergenceFit(
            order=math.nan,
            scales=tuple(factors),
            deviations=tuple(deviations),
            inconclusive=True,
        )
    slope, _ = np.polyfit(np.log(factors), np.log(deviations), 1)
    monotone = all(
        later < earlier for earlier, later in zip(deviations, deviations[1:])
    )
    return ConvergenceFit(
        order=float(slope),
        scales=tuple(factors),
        deviations=tuple(deviations),
        inconclusive=not monotone,
    )


def jw_residual(spec: OracleSpec):
    """(spin value, mapped fermion value, residual) for the input coherence.

    Builds both exact models at the same parameters and compares
    <sigma1x> against 2 <coh1>_F - 4 f1 f2 Omega tanh(beta omega1/2) /
    omega1, the affine correspondence the closed forms satisfy order by
    order.  The fermionization drops operator-valued shifts whose effect
    on thermal averages is claimed small but never zero; this measures
    it instead of assuming it away.
    """
    spin_value = exact_average(replace(spec, model="spin"), "sigma1x")
    coh1 = exact_average(replace(spec, model="fermion"), "fermion_coh1")
    p = spec.params
    offset = (
        4.0
        * p.f1
        * p.f2
        * spec.bath.reorganization_omega()
        * thermal_tanh_half(spec.beta, p.omega1)
        / p.omega1
    )
    mapped = 2.0 * coh1 - offset
    return spin_value, mapped, abs(spin_value - mapped)
