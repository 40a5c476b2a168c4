"""Pairwise thermal entanglement of the trimer in its effective field.

Tracing one site out of the trimer thermal state leaves a two-qubit X-state
whose entries have closed forms; the concurrence of that state reduces to
2 max(|y| - sqrt(u v), 0) on normalized entries.  A generic spin-flip
eigenvalue route is kept alongside as an independent oracle.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidDensityMatrix
from .logdomain import LN2, LN3, log_abs_expm1, logaddexp, logsumexp3
from .mean_field import SolverConfig, select_equilibrium, solve_self_consistent
from .trimer import EffectiveFields, ModelParams, trimer_partition, _check_t


@dataclass(frozen=True)
class XState:
    """Two-qubit X-state entries normalized by the trimer partition value.

    u sits at |00><00|, v at |11><11|, w on the two middle diagonal entries
    and y on the middle anti-diagonal.  Raw log magnitudes and log Z are kept
    so the entries stay meaningful when the linear partition value overflows.
    """

    u: float
    w: float
    y: float
    v: float
    log_u: float
    log_w: float
    log_abs_y: float
    log_v: float
    log_z: float
    lambda_aa: float
    gamma_a: float
    t: float

    @property
    def z_norm(self) -> float:
        return math.exp(self.log_z) if self.log_z < 709.0 else math.inf

    def to_matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.u, 0.0, 0.0, 0.0],
                [0.0, self.w, self.y, 0.0],
                [0.0, self.y, self.w, 0.0],
                [0.0, 0.0, 0.0, self.v],
            ]
        )


@dataclass(frozen=True)
class ConcurrenceResult:
    value: float
    branch: str
    t: float = None
    gamma_a: float = None
    lambda_aa: float = None
    h: float = None


def reduced_density_matrix(fields: EffectiveFields, t: float) -> XState:
    """Closed-form reduced state of two trimer sites (third site traced out)."""
    _check_t(t)
    lam = fields.lambda_aa
    g = fields.gamma_a
    bg = g / t
    bl = 1.5 * lam / t

    log_u = -LN3 + (2.0 * g - 3.0 * lam) / (4.0 * t) + logsumexp3(
        0.0, LN3 + bg, LN2 + bl
    )
    log_v = -LN3 - 3.0 * (2.0 * g + lam) / (4.0 * t) + logsumexp3(
        LN3, bg, LN2 + bg + bl
    )
    base = -LN3 - (2.0 * g + 3.0 * lam) / (4.0 * t) + logaddexp(0.0, bg)
    log_w = base + logaddexp(0.0, LN2 + bl)
    log_abs_y = base + log_abs_expm1(bl)
    y_sign = 0.0 if lam == 0.0 else (-1.0 if lam > 0.0 else 1.0)

    log_z = trimer_partition(fields, t).log_value
    return XState(
        u=math.exp(log_u - log_z),
        w=math.exp(log_w - log_z),
        y=y_sign * math.exp(log_abs_y - log_z),
        v=math.exp(log_v - log_z),
        log_u=log_u,
        log_w=log_w,
        log_abs_y=log_abs_y,
        log_v=log_v,
        log_z=log_z,
        lambda_aa=lam,
        gamma_a=g,
        t=t,
    )


def concurrence_xstate(x: XState) -> ConcurrenceResult:
    """Closed-form concurrence 2 max(|y| - sqrt(u v), 0) of an X-state."""
    value = 2.0 * max(abs(x.y) - math.sqrt(x.u * x.v), 0.0)
    return ConcurrenceResult(
        value=value,
        branch="closed-form",
        t=x.t,
        gamma_a=x.gamma_a,
        lambda_aa=x.lambda_aa,
    )


_SYY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def concurrence_wootters(rho12) -> ConcurrenceResult:
    """Spin-flip concurrence of an arbitrary two-qubit density matrix.

    Square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy), sorted
    descending; the result is max(l1 - l2 - l3 - l4, 0).
    """
    rho = np.asarray(rho12, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidDensityMatrix(f"expected a 4x4 matrix, got {rho.shape}")
    if abs(np.trace(rho) - 1.0) > 1e-8:
        raise InvalidDensityMatrix("trace differs from one")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise InvalidDensityMatrix("matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise InvalidDensityMatrix("matrix has a negative eigenvalue")

    rho_tilde = rho @ _SYY @ rho.conj() @ _SYY
    ev = np.linalg.eigvals(rho_tilde)
    # eigenvalues are real and nonnegative up to rounding
    lams = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    value = max(lams[0] - lams[1] - lams[2] - lams[3], 0.0)
    return ConcurrenceResult(value=value, branch="wootters-oracle")


def concurrence_at(
    params: ModelParams, t: float, config: SolverConfig = None
) -> ConcurrenceResult:
    """Concurrence on the self-consistent equilibrium branch at (params, t)."""
    state = select_equilibrium(solve_self_consistent(params, t, config))
    result = concurrence_xstate(reduced_density_matrix(state.fields, t))
    return replace(result, h=params.h)
