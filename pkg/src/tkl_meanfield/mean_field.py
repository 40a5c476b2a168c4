"""Variational layer: effective fields, the coupled magnetization maps,
damped multi-seed fixed-point solving and free-energy branch selection."""

import math
from dataclasses import dataclass

from .errors import NoConvergedBranch
from .logdomain import LN2, logaddexp
from .trimer import (
    EffectiveFields,
    ModelParams,
    monomer_free_energy,
    trimer_free_energy,
    _check_t,
)

# saturated, plateau and paramagnetic starting points
DEFAULT_SEEDS = (
    (0.49, 0.49),
    (-0.49, -0.49),
    (1.0 / 6.0, 0.49),
    (-1.0 / 6.0, -0.49),
    (0.01, 0.01),
    (0.0, 0.0),
)


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-12
    max_iterations: int = 100_000
    damping: float = 0.7
    seeds: tuple = DEFAULT_SEEDS

    def __post_init__(self):
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if len(self.seeds) == 0:
            raise ValueError("seed list must be non-empty")


@dataclass(frozen=True)
class SelfConsistentState:
    """A converged (or abandoned) fixed point of the coupled maps."""

    m_a: float
    m_b: float
    fields: EffectiveFields
    free_energy_per_site: float
    iterations: int
    residual: float
    converged: bool


def effective_fields(m_a: float, m_b: float, params: ModelParams) -> EffectiveFields:
    """Variational fields (lambda_aa, gamma_a, gamma_b) for given magnetizations."""
    return EffectiveFields(
        lambda_aa=params.j_aa,
        gamma_a=2.0 * params.j_ab * m_b + params.h,
        gamma_b=4.0 * params.j_ab * m_a + params.h,
    )


def map_m_a(fields: EffectiveFields, t: float) -> float:
    """Single-site trimer magnetization at fields (lambda_aa, gamma_a).

    Evaluates the closed-form ratio of shifted exponentials; safe for any
    field and for temperatures far below the exchange scale.
    """
    _check_t(t)
    x = fields.gamma_a / (2.0 * t)
    if x == 0.0:
        return 0.0
    sign = 1.0 if x > 0.0 else -1.0
    x = abs(x)
    logk = logaddexp(LN2 + 1.5 * fields.lambda_aa / t, 0.0)
    shift = max(3.0 * x, logk + x)
    e3 = math.exp(3.0 * x - shift)
    ek = math.exp(logk + x - shift)
    num = 3.0 * e3 * -math.expm1(-6.0 * x) + ek * -math.expm1(-2.0 * x)
    den = e3 * (1.0 + math.exp(-6.0 * x)) + ek * (1.0 + math.exp(-2.0 * x))
    return sign * num / (6.0 * den)


def map_m_b(fields: EffectiveFields, t: float) -> float:
    """Single-site monomer magnetization, (1/2) tanh(gamma_b / 2T)."""
    _check_t(t)
    return 0.5 * math.tanh(fields.gamma_b / (2.0 * t))


def free_energy_per_site(m_a: float, m_b: float, params: ModelParams, t: float) -> float:
    """Variational free energy per lattice site at given magnetizations.

    Per-cluster value: trimer free energy + 3/2 monomer free energies +
    6 j_ab m_a m_b; there are 2/3 clusters per three sites, hence the 2/9.
    """
    f = effective_fields(m_a, m_b, params)
    return (2.0 / 9.0) * (
        trimer_free_energy(f, t)
        + 1.5 * monomer_free_energy(f.gamma_b, t)
        + 6.0 * params.j_ab * m_a * m_b
    )


def _clamp(v):
    return max(-0.55, min(0.55, v))


def _geometric_tail(d, prev_d, eta):
    """Remaining geometric sum of damped updates, eta*d*r/(1-r) with r = d/prev_d."""
    if prev_d == 0.0 or d == 0.0:
        return 0.0
    r = d / prev_d
    if not 0.0 < r < 1.0:
        return 0.0
    r = min(r, 1.0 - 1e-12)
    return max(-0.3, min(0.3, eta * d * r / (1.0 - r)))


def _solve_from_seed(params, t, config, seed):
    """Damped fixed-point iteration from one seed.

    When the update sequence contracts monotonically, the remaining
    geometric tail is extrapolated (Steffensen-style) and added in one jump;
    near the ordering temperature the plain iteration slows down as the
    contraction rate approaches one, and the extrapolation keeps the
    iteration count bounded.  Convergence is always certified by a fresh
    residual below tolerance.
    """
    eta = config.damping
    tol = config.tolerance
    m_a, m_b = float(seed[0]), float(seed[1])

    residual = math.inf
    prev_da = 0.0
    prev_db = 0.0
    prev_residual = math.inf
    flips = 0
    streak = 0
    cooldown = 0
    converged = False
    iterations = 0

    for iterations in range(1, config.max_iterations + 1):
        f = effective_fields(m_a, m_b, params)
        da = map_m_a(f, t) - m_a
        db = map_m_b(f, t) - m_b
        residual = max(abs(da), abs(db))
        if residual < tol:
            converged = True
            break

        m_a += eta * da
        m_b += eta * db

        if da * prev_da < 0.0 or db * prev_db < 0.0:
            # oscillation control: halve the mixing on persistent sign flips
            streak = 0
            flips += 1
            if flips >= 10:
                eta = max(0.05, 0.5 * eta)
                flips = 0
        else:
            flips = 0
            streak = streak + 1 if residual < prev_residual else 0

        if cooldown > 0:
            cooldown -= 1
        elif streak >= 4:
            jump_a = _geometric_tail(da, prev_da, eta)
            jump_b = _geometric_tail(db, prev_db, eta)
            if jump_a != 0.0 or jump_b != 0.0:
                m_a = _clamp(m_a + jump_a)
                m_b = _clamp(m_b + jump_b)
                cooldown = 3
                streak = 0

        prev_da, prev_db = da, db
        prev_residual = residual

    return SelfConsistentState(
        m_a=m_a,
        m_b=m_b,
        fields=effective_fields(m_a, m_b, params),
        free_energy_per_site=free_energy_per_site(m_a, m_b, params, t),
        iterations=iterations,
        residual=residual,
        converged=converged,
    )


def solve_self_consistent(params: ModelParams, t: float, config: SolverConfig = None):
    """Solve the coupled magnetization equations from every configured seed.

    Returns all distinct states (converged ones first), deduplicated at
    10x tolerance in the (m_a, m_b) sup norm.  Seeds that exhaust the
    iteration budget are returned with ``converged=False``; persistent
    non-convergence signals that the damping should be tightened.
    """
    _check_t(t)
    if config is None:
        config = SolverConfig()
    states = [_solve_from_seed(params, t, config, seed) for seed in config.seeds]
    # among numerical twins the smallest residual wins the dedup, so an exact
    # fixed point (residual 0) is never shadowed by a loosely converged copy
    states.sort(
        key=lambda s: (not s.converged, s.free_energy_per_site, s.residual, -s.m_a, -s.m_b)
    )
    radius = 10.0 * config.tolerance
    kept = []
    for s in states:
        if any(
            max(abs(s.m_a - k.m_a), abs(s.m_b - k.m_b)) <= radius for k in kept
        ):
            continue
        kept.append(s)
    return kept


def select_equilibrium(states) -> SelfConsistentState:
    """The converged state of minimal free energy.

    Ties within 1e-12 are broken toward m_a >= 0; among those the smallest
    residual wins (an exact fixed point beats a loosely converged twin,
    which keeps the disordered branch exactly at zero above the transition),
    then the larger m_a.
    """
    converged = [s for s in states if s.converged]
    if not converged:
        raise NoConvergedBranch("no converged self-consistent branch")
    best = min(s.free_energy_per_site for s in converged)
    ties = [s for s in converged if s.free_energy_per_site <= best + 1e-12]
    nonneg = [s for s in ties if s.m_a >= 0.0]
    pool = nonneg if nonneg else ties
    return min(pool, key=lambda s: (s.residual, -s.m_a, -s.m_b))
