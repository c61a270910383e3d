"""Parameter sweeps over the closed-form coherence quantities.

A sweep walks a cartesian grid of dimensionless axes (temperature, level
splitting ratio, hopping, cutoff ratio), evaluates one named quantity at
every grid point, and collects the results in a :class:`~cohex.table.SweepTable`.
Cells where a formula refuses to evaluate (degenerate bases, resonance
guards, cross-form disagreement) are kept in the table with an empty value
and a status word instead of aborting the whole grid, so a sweep across a
validity boundary stays useful.

Evaluation order over the grid is fixed by the axis order, and workers only
compute pure functions of their cell, so the assembled table is identical
whether the grid is evaluated serially or on a process pool.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    ConvergenceError,
    CrossFormError,
    DegenerateBasisError,
    DomainError,
    KernelError,
    NearResonanceError,
)
from .numerics import QuadratureConfig
from .spectral import OhmicDensity, SpectralDensity
from .spin_detuned import (
    ModelParams,
    ThermalPoint,
    normalized_coherences_spin,
    normalized_output_ratio,
    sigma1x,
    sigma2x,
    sigma2x_low_T,
    sigma2y,
    static_chain,
    static_chain_flags,
)
from .spin_general import r1_value, r2_value, sigma1x_general, sigma2x_general
from . import fermion as _fermion
from .table import STATUS_OK, SweepTable

__all__ = [
    "AXIS_NAMES",
    "TEMPERATURE_AXES",
    "AxisSpec",
    "SweepSpec",
    "SweepQuantity",
    "QUANTITIES",
    "SPIN_QUANTITIES",
    "FERMION_QUANTITIES",
    "quantity_names",
    "run_sweep",
]

#: Axes a sweep may walk; every axis is dimensionless.
AXIS_NAMES = (
    "T_over_omega1",
    "beta_omega1",
    "omega2_over_omega1",
    "t_over_omega1",
    "omega1_over_omegac",
)

#: The two mutually exclusive ways of spelling the temperature axis.
TEMPERATURE_AXES = ("T_over_omega1", "beta_omega1")


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: a named grid of dimensionless values.

    Attributes
    ----------
    name : str
        One of :data:`AXIS_NAMES`.
    start, stop : float
        Grid endpoints (inclusive).
    points : int
        Number of grid points; a single-point axis pins the value.
    spacing : str
        ``"linear"`` or ``"log"``; log spacing needs positive endpoints.
    """

    name: str
    start: float
    stop: float
    points: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise DomainError(
                f"unknown axis {self.name!r}; valid axes: {', '.join(AXIS_NAMES)}"
            )
        for label, v in (("start", self.start), ("stop", self.stop)):
            if not np.isfinite(v):
                raise DomainError(f"axis {self.name}: {label} must be finite")
        if self.points < 1:
            raise DomainError(f"axis {self.name}: points must be at least 1")
        if self.points == 1 and self.start != self.stop:
            raise DomainError(
                f"axis {self.name}: a single-point axis needs start == stop"
            )
        if self.spacing not in ("linear", "log"):
            raise DomainError(
                f"axis {self.name}: spacing must be 'linear' or 'log'"
            )
        if self.spacing == "log" and not (self.start > 0.0 and self.stop > 0.0):
            raise DomainError(
                f"axis {self.name}: log spacing needs positive endpoints"
            )

    def values(self) -> np.ndarray:
        """The grid as a float array, in axis order."""
        if self.points == 1:
            return np.array([float(self.start)])
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    def describe(self) -> str:
        """Compact ``start:stop:points:spacing`` form for table metadata."""
        return f"{self.start!r}:{self.stop!r}:{self.points}:{self.spacing}"


@dataclass(frozen=True)
class SweepQuantity:
    """Registry entry tying a quantity name to its evaluator.

    ``evaluate(params, sd, tp, config)`` returns ``(values, err, flags)``
    where ``values`` has one float per entry in ``columns``.
    """

    name: str
    columns: tuple
    model: str
    needs_ohmic: bool
    evaluate: object = field(repr=False)


def _one(result):
    """Adapt a CoherenceResult to the (values, err, flags) protocol."""
    return (result.value,), result.err_estimate, result.flags


def _eval_sigma1x(p, sd, tp, cfg):
    return _one(sigma1x(p, sd, tp, cfg))


def _eval_sigma2x(p, sd, tp, cfg):
    return _one(sigma2x(p, sd, tp, cfg))


def _eval_sigma2y(p, sd, tp, cfg):
    return _one(sigma2y(p, sd, tp))


def _eval_sigma1x_general(p, sd, tp, cfg):
    return _one(sigma1x_general(p, sd, tp, cfg))


def _eval_sigma2x_general(p, sd, tp, cfg):
    return _one(sigma2x_general(p, sd, tp, cfg))


def _eval_r1(p, sd, tp, cfg):
    return _one(r1_value(p, sd, tp, cfg))


def _eval_r2(p, sd, tp, cfg):
    return _one(r2_value(p, sd, tp, cfg))


def _eval_static_sigma2x(p, sd, tp, cfg):
    chain = static_chain(p, sd, tp)
    return (chain.sigma2x_st,), 0.0, static_chain_flags(p, sd, tp)


def _eval_sigma2x_low_T(p, sd, tp, cfg):
    return _one(sigma2x_low_T(p, sd.coupling, sd.cutoff, tp))


def _eval_normalized_output_ratio(p, sd, tp, cfg):
    return (normalized_output_ratio(p, sd, tp, cfg),), 0.0, ()


def _eval_normalized_spin(p, sd, tp, cfg):
    pair = normalized_coherences_spin(
        p.omega1 / sd.cutoff,
        tp.beta_omega1(p.omega1),
        p.omega2 / p.omega1,
        cfg,
    )
    return pair, 0.0, ()


def _eval_static_compare(p, sd, tp, cfg):
    full = sigma2x(p, sd, tp, cfg)
    chain = static_chain(p, sd, tp)
    low = sigma2x_low_T(p, sd.coupling, sd.cutoff, tp)
    flags = []
    for f in full.flags + static_chain_flags(p, sd, tp) + low.flags:
        if f not in flags:
            flags.append(f)
    values = (full.value, chain.sigma2x_st, low.value)
    return values, full.err_estimate, tuple(flags)


def _eval_sigma1x_fermion(p, sd, tp, cfg):
    return _one(_fermion.sigma1x_fermion(p, sd, tp, cfg))


def _eval_sigma2x_fermion(p, sd, tp, cfg):
    return _one(_fermion.sigma2x_fermion(p, sd, tp, cfg))


def _eval_hartree_fock(p, sd, tp, cfg):
    h1, h2 = _fermion.hartree_static(p, sd, tp)
    k1, k2 = _fermion.fock_term(p, sd, tp, cfg)
    return (h1, h2, k1, k2), 0.0, ()


def _eval_normalized_fermion(p, sd, tp, cfg):
    pair = _fermion.normalized_fermion(p, sd.coupling, sd.cutoff, tp, cfg)
    return pair, 0.0, ()


def _eval_ratio_R(p, sd, tp, cfg):
    return (_fermion.ratio_R(p, sd.coupling, sd.cutoff, tp, cfg),), 0.0, ()


def _eval_g_script(p, sd, tp, cfg):
    value = _fermion.g_script(
        tp.beta_omega1(p.omega1),
        p.omega1 / sd.cutoff,
        p.omega2 / p.omega1,
        p.t / p.omega1,
    )
    return (value,), 0.0, ()


def _eval_fermion_high_T(p, sd, tp, cfg):
    value = _fermion.fermion_high_T(p, sd.coupling, sd.cutoff, tp)
    return (value,), 0.0, ()


def _registry():
    spin = [
        SweepQuantity("sigma1x", ("sigma1x",), "spin", False, _eval_sigma1x),
        SweepQuantity("sigma2x", ("sigma2x",), "spin", False, _eval_sigma2x),
        SweepQuantity("sigma2y", ("sigma2y",), "spin", False, _eval_sigma2y),
        SweepQuantity(
            "sigma1x_general",
            ("sigma1x_general",),
            "spin",
            False,
            _eval_sigma1x_general,
        ),
        SweepQuantity(
            "sigma2x_general",
            ("sigma2x_general",),
            "spin",
            False,
            _eval_sigma2x_general,
        ),
        SweepQuantity("r1", ("r1",), "spin", False, _eval_r1),
        SweepQuantity("r2", ("r2",), "spin", False, _eval_r2),
        SweepQuantity(
            "static_sigma2x",
            ("static_sigma2x",),
            "spin",
            False,
            _eval_static_sigma2x,
        ),
        SweepQuantity(
            "sigma2x_low_T",
            ("sigma2x_low_T",),
            "spin",
            True,
            _eval_sigma2x_low_T,
        ),
        SweepQuantity(
            "normalized_output_ratio",
            ("normalized_output_ratio",),
            "spin",
            True,
            _eval_normalized_output_ratio,
        ),
        SweepQuantity(
            "normalized_spin",
            ("normalized_sigma1x", "normalized_sigma2x"),
            "spin",
            True,
            _eval_normalized_spin,
        ),
        SweepQuantity(
            "static_compare",
            ("sigma2x_full", "sigma2x_static", "sigma2x_low_T"),
            "spin",
            True,
            _eval_static_compare,
        ),
    ]
    fermi = [
        SweepQuantity(
            "sigma1x_fermion",
            ("sigma1x_fermion",),
            "fermion",
            False,
            _eval_sigma1x_fermion,
        ),
        SweepQuantity(
            "sigma2x_fermion",
            ("sigma2x_fermion",),
            "fermion",
            False,
            _eval_sigma2x_fermion,
        ),
        SweepQuantity(
            "hartree_fock",
            ("hartree1", "hartree2", "fock1", "fock2"),
            "fermion",
            False,
            _eval_hartree_fock,
        ),
        SweepQuantity(
            "normalized_fermion",
            ("normalized_fermion1", "normalized_fermion2"),
            "fermion",
            True,
            _eval_normalized_fermion,
        ),
        SweepQuantity("ratio_R", ("ratio_R",), "fermion", True, _eval_ratio_R),
        SweepQuantity("g_script", ("g_script",), "fermion", True, _eval_g_script),
        SweepQuantity(
            "fermion_high_T",
            ("fermion_high_T",),
            "fermion",
            True,
            _eval_fermion_high_T,
        ),
    ]
    return {q.name: q for q in spin + fermi}


QUANTITIES = _registry()
SPIN_QUANTITIES = tuple(n for n, q in QUANTITIES.items() if q.model == "spin")
FERMION_QUANTITIES = tuple(
    n for n, q in QUANTITIES.items() if q.model == "fermion"
)


def quantity_names(model: str | None = None) -> tuple:
    """Registered quantity names, optionally restricted to one model."""
    if model is None:
        return tuple(QUANTITIES)
    if model == "spin":
        return SPIN_QUANTITIES
    if model == "fermion":
        return FERMION_QUANTITIES
    raise DomainError("model must be 'spin' or 'fermion'")


@dataclass(frozen=True)
class SweepSpec:
    """A complete sweep request: quantity, grid, bath, and base parameters.

    The base ``params`` fix ``omega1`` and the bath weights ``f1, f2``;
    axes override ``omega2``, ``t`` and the cutoff per cell.  Exactly one
    temperature axis is required, which keeps temperature an explicit
    column of every table rather than a hidden default.
    """

    quantity: str
    axes: tuple
    bath: SpectralDensity
    params: ModelParams
    config: QuadratureConfig | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise DomainError(
                f"unknown quantity {self.quantity!r}; valid quantities: "
                + ", ".join(QUANTITIES)
            )
        if not self.axes:
            raise DomainError("a sweep needs at least one axis")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise DomainError("axis names must be unique")
        n_temp = sum(name in TEMPERATURE_AXES for name in names)
        if n_temp == 0:
            raise DomainError(
                "a sweep needs an explicit temperature axis "
                "(T_over_omega1 or beta_omega1), even a single-point one"
            )
        if n_temp > 1:
            raise DomainError(
                "give the temperature as either T_over_omega1 or "
                "beta_omega1, not both"
            )
        needs_ohmic = QUANTITIES[self.quantity].needs_ohmic
        if "omega1_over_omegac" in names:
            needs_ohmic = True
        if needs_ohmic and not isinstance(self.bath, OhmicDensity):
            raise DomainError(
                f"quantity {self.quantity!r} (or a cutoff-ratio axis) "
                "needs an ohmic bath"
            )

    def axis_names(self) -> tuple:
        return tuple(a.name for a in self.axes)

    def columns(self) -> tuple:
        """Column names of the resulting table."""
        value_cols = QUANTITIES[self.quantity].columns
        return self.axis_names() + value_cols + ("err_estimate", "status")


def _cell_inputs(spec: SweepSpec, point: dict):
    """Model parameters, bath, and thermal point for one grid cell."""
    p = spec.params
    w1 = p.omega1
    if "omega2_over_omega1" in point:
        p = replace(p, omega2=point["omega2_over_omega1"] * w1)
    if "t_over_omega1" in point:
        p = replace(p, t=point["t_over_omega1"] * w1)
    sd = spec.bath
    if "omega1_over_omegac" in point:
        ratio = point["omega1_over_omegac"]
        if not (ratio > 0.0):
            raise DomainError("omega1_over_omegac must be positive")
        sd = OhmicDensity(spec.bath.coupling, w1 / ratio)
    if "beta_omega1" in point:
        tp = ThermalPoint.from_beta_omega1(point["beta_omega1"], w1)
    else:
        tp = ThermalPoint.from_T_over_omega1(point["T_over_omega1"], w1)
    return p, sd, tp


def _sweep_cell(task):
    """One grid cell; returns (values, err, status). Picklable for pools."""
    spec, values = task
    quantity = QUANTITIES[spec.quantity]
    blank = (None,) * len(quantity.columns)
    point = dict(zip(spec.axis_names(), values))
    try:
        p, sd, tp = _cell_inputs(spec, point)
        cell_values, err, flags = quantity.evaluate(p, sd, tp, spec.config)
        return cell_values, err, ";".join(flags) or STATUS_OK
    except NearResonanceError:
        return blank, None, "near-resonance"
    except DegenerateBasisError:
        return blank, None, "degenerate-basis"
    except DomainError:
        return blank, None, "invalid-params"
    except ConvergenceError:
        return blank, None, "no-convergence"
    except CrossFormError:
        return blank, None, "cross-form-disagreement"
    except KernelError:
        return blank, None, "kernel-error"


def run_sweep(
    spec: SweepSpec,
    jobs: int | None = None,
    extra_meta: dict | None = None,
) -> SweepTable:
    """Evaluate a sweep and return its table.

    Parameters
    ----------
    spec : SweepSpec
        Quantity, axes, bath, and base parameters.
    jobs : int, optional
        Process count for parallel evaluation.  The output is identical
        for any value because rows are assembled in grid order.
    extra_meta : dict, optional
        Additional metadata merged into the table (all values coerced to
        strings); used by the command line to embed its resolved config.

    Returns
    -------
    SweepTable
        One row per grid cell: axis values, value columns, ``err_estimate``,
        and a ``status`` word (``ok``, advisory flags joined with ``;``, or
        an error word with empty value cells).
    """
    grids = [spec.axes[i].values() for i in range(len(spec.axes))]
    tasks = [
        (spec, tuple(float(v) for v in combo))
        for combo in itertools.product(*grids)
    ]
    if jobs is not None and jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (8 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_sweep_cell, tasks, chunksize=chunk))
    else:
        cells = [_sweep_cell(t) for t in tasks]
    rows = [
        task[1] + values + (err, status)
        for task, (values, err, status) in zip(tasks, cells)
    ]
    meta = {
        "quantity": spec.quantity,
        "model": QUANTITIES[spec.quantity].model,
        "bath": repr(spec.bath),
        "params": repr(spec.params),
    }
    for axis in spec.axes:
        meta[f"axis {axis.name}"] = axis.describe()
    if extra_meta:
        for key, value in extra_meta.items():
            meta[str(key)] = str(value)
    return SweepTable(spec.columns(), rows, meta)
