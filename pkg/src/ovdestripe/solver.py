"""ADMM decomposition of an observation into a clean image and a stripe field.

Minimizes::

    TV(X) + lambda1 * ||D_theta (X - Y)||_1 + lambda2 * ||X - Y||_1

with the splitting ``d = D X`` (``D = [D_h; D_v]``), ``V = D_theta (X - Y)``
and ``H = X - Y``.  Each sweep updates ``V`` and ``H`` by soft shrinkage,
``d`` by vectorial shrinkage, ``X`` by an exact FFT solve of the quadratic
sub-problem, then ascends the multipliers.  All operators are periodic.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .image import D_H, D_V, OffsetOperator, apply_offset_diff, \
    apply_offset_diff_adjoint, as_image, operator_spectrum
from .orientation import CandidateDirection

log = logging.getLogger(__name__)


class SolverDiagnosticError(RuntimeError):
    """A non-finite value appeared during the iteration."""

    def __init__(self, step: str, iteration: int):
        super().__init__(f"non-finite values produced by {step} at iteration {iteration}")
        self.step = step
        self.iteration = iteration


@dataclass(frozen=True)
class SolverParams:
    direction: OffsetOperator
    lambda1: float = 2.0
    lambda2: float = 0.3
    rho1: float = 5.0
    rho2: float = 5.0
    rho3: float = 5.0
    eps_stop: float = 1e-5
    n_max: int = 200

    def __post_init__(self):
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise ValueError("lambda1 and lambda2 must be positive")
        # rho1 = rho2 = 0 is allowed so the X step can be checked in isolation
        if self.rho1 < 0 or self.rho2 < 0 or not self.rho3 > 0:
            raise ValueError("need rho1 >= 0, rho2 >= 0 and rho3 > 0")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be an integer >= 1")
        if self.eps_stop < 0:
            raise ValueError("eps_stop must be non-negative")


@dataclass
class SolverState:
    X: np.ndarray
    d_h: np.ndarray
    d_v: np.ndarray
    V: np.ndarray
    H: np.ndarray
    p_h: np.ndarray
    p_v: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    k: int = 0

    @classmethod
    def initial(cls, y: np.ndarray) -> "SolverState":
        """``X = Y``; auxiliaries and multipliers start at zero."""
        z = np.zeros_like(y)
        return cls(y.copy(), z.copy(), z.copy(), z.copy(), z.copy(),
                   z.copy(), z.copy(), z.copy(), z.copy())


@dataclass
class Spectra:
    """Operator transfer functions and the fixed X-step denominator."""

    lam_h: np.ndarray
    lam_v: np.ndarray
    lam_theta: np.ndarray
    denominator: np.ndarray

    @classmethod
    def build(cls, shape, params: SolverParams) -> "Spectra":
        rows, cols = shape
        lam_h = operator_spectrum(D_H, rows, cols)
        lam_v = operator_spectrum(D_V, rows, cols)
        lam_t = operator_spectrum(params.direction, rows, cols)
        denom = (params.rho1 * (np.abs(lam_h) ** 2 + np.abs(lam_v) ** 2)
                 + params.rho2 * np.abs(lam_t) ** 2 + params.rho3)
        return cls(lam_h, lam_v, lam_t, denom)


@dataclass
class TraceRow:
    k: int
    rel_change: float
    objective: float
    res_tv: float
    res_ov: float
    res_l1: float


@dataclass
class DestripeResult:
    X: np.ndarray
    S: np.ndarray
    trace: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.trace)


def total_variation(x) -> float:
    """Isotropic TV with periodic differences."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.hypot(apply_offset_diff(x, D_H), apply_offset_diff(x, D_V)).sum())


def objective(x, y, params: SolverParams) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    s = x - y
    return (total_variation(x)
            + params.lambda1 * float(np.abs(apply_offset_diff(s, params.direction)).sum())
            + params.lambda2 * float(np.abs(s).sum()))


def soft_shrink(alpha, gamma: float) -> np.ndarray:
    """``sign(alpha) * max(|alpha| - gamma, 0)``, elementwise."""
    if gamma < 0:
        raise ValueError("shrinkage threshold must be non-negative")
    alpha = np.asarray(alpha, dtype=np.float64)
    return np.sign(alpha) * np.maximum(np.abs(alpha) - gamma, 0.0)


def vector_shrink(u, v, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Radial shrinkage of the 2-vector field ``(u, v)`` by ``gamma``.

    Zero vectors stay zero.
    """
    w = np.hypot(u, v)
    scale = np.zeros_like(w)
    nz = w > 0
    scale[nz] = np.maximum(w[nz] - gamma, 0.0) / w[nz]
    return scale * u, scale * v


def update_V(state: SolverState, y, params: SolverParams) -> np.ndarray:
    arg = apply_offset_diff(state.X - y, params.direction) + state.p2 / params.rho2
    return soft_shrink(arg, params.lambda1 / params.rho2)


def update_H(state: SolverState, y, params: SolverParams) -> np.ndarray:
    return soft_shrink(state.X - y + state.p3 / params.rho3, params.lambda2 / params.rho3)


def update_d(state: SolverState, params: SolverParams) -> tuple[np.ndarray, np.ndarray]:
    u = apply_offset_diff(state.X, D_H) + state.p_h / params.rho1
    v = apply_offset_diff(state.X, D_V) + state.p_v / params.rho1
    return vector_shrink(u, v, 1.0 / params.rho1)


def x_step_rhs(state: SolverState, y, params: SolverParams) -> np.ndarray:
    """Right-hand side of the X normal equations."""
    rhs = params.rho3 * (y + state.H) - state.p3
    if params.rho1:
        rhs = rhs + apply_offset_diff_adjoint(params.rho1 * state.d_h - state.p_h, D_H)
        rhs = rhs + apply_offset_diff_adjoint(params.rho1 * state.d_v - state.p_v, D_V)
    if params.rho2:
        theta = params.direction
        rhs = rhs + apply_offset_diff_adjoint(
            params.rho2 * (apply_offset_diff(y, theta) + state.V) - state.p2, theta)
    return rhs


def normal_operator(x, params: SolverParams) -> np.ndarray:
    """``(rho1 D^T D + rho2 D_theta^T D_theta + rho3 I) x``, applied spatially."""
    out = params.rho3 * x
    for op, rho in ((D_H, params.rho1), (D_V, params.rho1), (params.direction, params.rho2)):
        if rho:
            out = out + rho * apply_offset_diff_adjoint(apply_offset_diff(x, op), op)
    return out


def update_X(state: SolverState, y, params: SolverParams, spectra: Spectra) -> np.ndarray:
    rhs = x_step_rhs(state, y, params)
    return np.fft.ifft2(np.fft.fft2(rhs) / spectra.denominator).real


def update_multipliers(state: SolverState, y, params: SolverParams):
    """Dual ascent on the three constraints; returns ``((p_h, p_v), p2, p3)``."""
    x = state.X
    p_h = state.p_h + params.rho1 * (apply_offset_diff(x, D_H) - state.d_h)
    p_v = state.p_v + params.rho1 * (apply_offset_diff(x, D_V) - state.d_v)
    p2 = state.p2 + params.rho2 * (apply_offset_diff(x - y, params.direction) - state.V)
    p3 = state.p3 + params.rho3 * (x - y - state.H)
    return (p_h, p_v), p2, p3


def feasibility_residuals(state: SolverState, y, params: SolverParams) -> tuple[float, float, float]:
    """Frobenius norms of ``DX - d``, ``D_theta (X - Y) - V`` and ``X - Y - H``."""
    x = state.X
    r_tv = np.sqrt(np.sum((apply_offset_diff(x, D_H) - state.d_h) ** 2)
                   + np.sum((apply_offset_diff(x, D_V) - state.d_v) ** 2))
    r_ov = np.linalg.norm(apply_offset_diff(x - y, params.direction) - state.V)
    r_l1 = np.linalg.norm(x - y - state.H)
    return float(r_tv), float(r_ov), float(r_l1)


def _check(arr, step: str, k: int):
    if not np.all(np.isfinite(arr)):
        raise SolverDiagnosticError(step, k)


def destripe(y, params: SolverParams) -> DestripeResult:
    """Run the ADMM iteration until the relative change of ``X`` drops to
    ``eps_stop`` or ``n_max`` sweeps have been made.

    Parameters
    ----------
    y : array_like
        Observation, normalized to [0, 1].
    params : SolverParams
        Weights, penalties, stopping rule and the stripe direction.

    Returns
    -------
    DestripeResult
        Clean estimate ``X``, stripe field ``S = Y - X`` and one
        :class:`TraceRow` per sweep.
    """
    y = as_image(y)
    state = SolverState.initial(y)
    spectra = Spectra.build(y.shape, params)
    trace = []
    converged = False
    while state.k < params.n_max:
        k = state.k + 1
        state.V = update_V(state, y, params)
        _check(state.V, "V update", k)
        state.H = update_H(state, y, params)
        _check(state.H, "H update", k)
        state.d_h, state.d_v = update_d(state, params)
        _check(state.d_h, "d update", k)
        _check(state.d_v, "d update", k)
        x_old = state.X
        state.X = update_X(state, y, params, spectra)
        _check(state.X, "X update", k)
        (state.p_h, state.p_v), state.p2, state.p3 = update_multipliers(state, y, params)
        for name in ("p_h", "p_v", "p2", "p3"):
            _check(getattr(state, name), "multiplier update", k)
        state.k = k

        change = np.linalg.norm(state.X - x_old)
        ref = np.linalg.norm(x_old)
        rel = change / ref if ref > 0 else (0.0 if change == 0 else np.inf)
        trace.append(TraceRow(k, float(rel), objective(state.X, y, params),
                              *feasibility_residuals(state, y, params)))
        if rel <= params.eps_stop:
            converged = True
            break
    log.debug("destripe stopped after %d sweeps (rel change %.3g)",
              state.k, trace[-1].rel_change)
    return DestripeResult(state.X, y - state.X, trace, converged)


def remove_stripes(y, r: int = 9, gf=None, theta_deg: float | None = None, **kwargs):
    """Estimate the stripe direction (unless ``theta_deg`` is given) and
    destripe ``y``.

    Extra keyword arguments go to :class:`SolverParams`.  Returns the
    :class:`DestripeResult` and the chosen :class:`CandidateDirection`.
    """
    from .guided_filter import GuidedFilterParams
    from .orientation import enumerate_candidates, estimate_orientation, select_candidate

    if theta_deg is None:
        direction = estimate_orientation(y, gf or GuidedFilterParams(), r).chosen
    else:
        direction = select_candidate(theta_deg, enumerate_candidates(r))
    return destripe(y, SolverParams(direction=direction, **kwargs)), direction


TRACE_COLUMNS = ("k", "rel_change", "objective", "res_tv", "res_ov", "res_l1")


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in trace:
            writer.writerow([row.k] + [repr(getattr(row, c)) for c in TRACE_COLUMNS[1:]])


__all__ = [
    "CandidateDirection", "DestripeResult", "SolverDiagnosticError", "SolverParams",
    "SolverState", "Spectra", "TraceRow", "destripe", "feasibility_residuals",
    "normal_operator", "objective", "remove_stripes", "soft_shrink", "total_variation",
    "update_H", "update_V", "update_X", "update_d", "update_multipliers",
    "vector_shrink", "write_trace_csv", "x_step_rhs",
]
