"""Critical and zero-temperature structure: ordering temperature by two
independent routes, concurrence threshold, ground-state phase labels,
saturation field and plateau detection."""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from scipy.optimize import brentq

from .entanglement import concurrence_at
from .errors import BracketFailure, CubicSignViolation
from .mean_field import (
    EffectiveFields,
    ModelParams,
    SolverConfig,
    effective_fields,
    map_m_a,
    map_m_b,
    select_equilibrium,
    solve_self_consistent,
)


@dataclass(frozen=True)
class CriticalResult:
    tc: float
    method: str
    bracket: tuple


@dataclass(frozen=True)
class PhaseLabel:
    """Zero-temperature phase of the trimer sublattice.

    Tags I/II are the partially polarized, maximally entangled phases
    (m_a = +-1/6, concurrence 1/3); III/IV are the saturated, disentangled
    ones (m_a = +-1/2).  ``ground_states`` lists the 1-based labels of the
    degenerate trimer ground kets.
    """

    tag: str
    m_a_value: float
    concurrence_value: float
    ground_states: tuple
    degenerate_boundary: bool = False


class Plateau(NamedTuple):
    x_start: float
    x_end: float
    level: float


def _default_bracket(j_aa, alpha):
    # ordering temperature scales like j_ab / sqrt(6) deep in the
    # strong-coupling regime; bracket generously around it
    scale = abs(alpha * j_aa) / math.sqrt(6.0)
    return (0.2 * scale, 4.0 * scale)


def critical_temperature_onset(
    j_aa: float,
    alpha: float,
    bracket: tuple = None,
    tol: float = 1e-8,
    config: SolverConfig = None,
) -> CriticalResult:
    """Bisect the onset of spontaneous |m_a| > 1e-8 at zero field."""
    if not j_aa > 0.0:
        raise ValueError("j_aa must be positive")
    if config is None:
        config = SolverConfig()
    params = ModelParams.from_alpha(j_aa, alpha, h=0.0)
    if bracket is None:
        if alpha == 0.0:
            raise BracketFailure("no ordering without inter-cluster coupling")
        bracket = _default_bracket(j_aa, alpha)

    def ordered(t):
        # spontaneous magnetization must win the free-energy comparison
        # strictly: the generic 1e-12 tie slack of select_equilibrium would
        # misclassify the near-degenerate region just above the transition
        states = [s for s in solve_self_consistent(params, t, config) if s.converged]
        f_zero = min(
            (s.free_energy_per_site for s in states if abs(s.m_a) <= 1e-8),
            default=math.inf,
        )
        f_mag = min(
            (s.free_energy_per_site for s in states if abs(s.m_a) > 1e-8),
            default=math.inf,
        )
        return f_mag < f_zero

    lo, hi = bracket
    if not (lo > 0.0 and hi > lo):
        raise ValueError("bracket must satisfy 0 < lo < hi")
    if not ordered(lo) or ordered(hi):
        raise BracketFailure(
            f"onset indicator does not change over bracket ({lo}, {hi})"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ordered(mid):
            lo = mid
        else:
            hi = mid
    return CriticalResult(tc=0.5 * (lo + hi), method="onset-bisection", bracket=(lo, hi))


def _composed_map(j_aa, j_ab, t):
    """The zero-field scalar map m_a -> m_a after one pass of the coupled system."""

    def g(m):
        gb = 4.0 * j_ab * m
        mb = map_m_b(EffectiveFields(j_aa, 0.0, gb), t)
        ga = 2.0 * j_ab * mb
        return map_m_a(EffectiveFields(j_aa, ga, 0.0), t)

    return g


def _linear_coefficient(j_aa, j_ab, t, dm=1e-6):
    g = _composed_map(j_aa, j_ab, t)
    return (g(dm) - g(-dm)) / (2.0 * dm)


def _cubic_coefficient(j_aa, j_ab, t, dm=1e-3):
    # for an odd map g(m) = a m + b m^3 + O(m^5):
    # g(2d)/(2d) - g(d)/d = 3 b d^2 + O(d^4)
    g = _composed_map(j_aa, j_ab, t)
    return (g(2.0 * dm) / (2.0 * dm) - g(dm) / dm) / (3.0 * dm * dm)


def critical_temperature_linearized(
    j_aa: float, alpha: float, tol: float = 1e-12
) -> CriticalResult:
    """Root of a(T) = 1 where a is the linear gain of the composed map at m=0.

    Structurally a = 8 j_ab^2 Phi_a'(0) Phi_b'(0); the gain is measured by
    numerical differentiation of the composed map itself.  The cubic
    coefficient is sign-checked at the root (a second-order transition needs
    b < 0); a violation is reported as a warning, not an error.
    """
    if not j_aa > 0.0:
        raise ValueError("j_aa must be positive")
    if alpha == 0.0:
        raise BracketFailure("no ordering without inter-cluster coupling")
    j_ab = alpha * j_aa
    lo, hi = _default_bracket(j_aa, alpha)

    def excess(t):
        return _linear_coefficient(j_aa, j_ab, t) - 1.0

    f_lo, f_hi = excess(lo), excess(hi)
    grow = 0
    while f_lo * f_hi > 0.0 and grow < 60:
        lo *= 0.5
        hi *= 2.0
        f_lo, f_hi = excess(lo), excess(hi)
        grow += 1
    if f_lo * f_hi > 0.0:
        raise BracketFailure("linear gain never crosses one")

    tc = brentq(excess, lo, hi, xtol=tol, rtol=8.881784197001252e-16)
    b = _cubic_coefficient(j_aa, j_ab, tc)
    if b >= 0.0:
        warnings.warn(
            f"cubic coefficient {b:.3e} is not negative at Tc", CubicSignViolation
        )
    return CriticalResult(tc=tc, method="linearized-map", bracket=(lo, hi))


def concurrence_threshold(
    params: ModelParams,
    bracket: tuple,
    tol: float = 1e-8,
    config: SolverConfig = None,
) -> float:
    """Bisect the temperature above which the equilibrium concurrence vanishes."""
    lo, hi = bracket
    if not (lo > 0.0 and hi > lo):
        raise ValueError("bracket must satisfy 0 < lo < hi")

    def entangled(t):
        return concurrence_at(params, t, config).value > 0.0

    if not entangled(lo):
        raise BracketFailure(f"concurrence already vanishes at T = {lo}")
    if entangled(hi):
        raise BracketFailure(f"concurrence still finite at T = {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ground-state branch table: per-site m_a, energy slot label, ket labels
_GROUND_BRANCHES = (
    (-0.5, 1, (1,)),
    (-1.0 / 6.0, 2, (2, 3)),
    (1.0 / 6.0, 5, (5, 6)),
    (0.5, 8, (8,)),
)

_TAGS = {0.5: "III", -0.5: "IV", 1.0 / 6.0: "I", -1.0 / 6.0: "II"}


def _trimer_ground(j_aa, gamma_a):
    """Minimal-energy branch of the trimer: (per-site m_a, energy, kets, tied)."""
    lam = j_aa
    energies = {
        -0.5: 0.75 * (lam + 2.0 * gamma_a),
        -1.0 / 6.0: 0.25 * (-3.0 * lam + 2.0 * gamma_a),
        1.0 / 6.0: 0.25 * (-3.0 * lam - 2.0 * gamma_a),
        0.5: 0.75 * (lam - 2.0 * gamma_a),
    }
    e_min = min(energies.values())
    tied = [m for m, e in energies.items() if e <= e_min + 1e-12]
    return energies, tied


def zero_temperature_phase(j_aa: float, j_ab: float, h: float) -> PhaseLabel:
    """Self-consistent ground-state phase of the trimer sublattice.

    Candidate (m_a, m_b) pairs are screened for consistency (the implied
    trimer ground state must reproduce m_a, and the monomer must align with
    its field); the consistent candidate of minimal energy per site wins.
    Exactly on a phase boundary the lower-|m| phase is returned with the
    ``degenerate_boundary`` flag set.
    """
    candidates = []
    boundary = False
    for m_a in (-0.5, -1.0 / 6.0, 1.0 / 6.0, 0.5):
        for m_b in (-0.5, 0.5):
            gamma_a = 2.0 * j_ab * m_b + h
            gamma_b = 4.0 * j_ab * m_a + h
            energies, tied = _trimer_ground(j_aa, gamma_a)
            if m_a not in tied:
                continue
            if len(tied) > 1:
                boundary = True
            if gamma_b == 0.0:
                boundary = True
            elif m_b * gamma_b < 0.0:
                continue
            e_site = (2.0 / 9.0) * (
                energies[m_a] - 0.75 * abs(gamma_b) + 6.0 * j_ab * m_a * m_b
            )
            candidates.append((e_site, m_a, m_b))
    if not candidates:
        raise RuntimeError("no self-consistent ground-state candidate")

    e_best = min(c[0] for c in candidates)
    ties = [c for c in candidates if c[0] <= e_best + 1e-12]
    if len({(c[1], c[2]) for c in ties}) > 1:
        boundary = True
    # boundary rule: keep the phase stable on the lower-field side,
    # i.e. the smallest m_a among the tied candidates
    _, m_a, _ = min(ties, key=lambda c: c[1])
    for m_val, _, kets in _GROUND_BRANCHES:
        if m_val == m_a:
            ground = kets
            break
    return PhaseLabel(
        tag=_TAGS[m_a],
        m_a_value=m_a,
        concurrence_value=(1.0 / 3.0 if abs(m_a) < 0.5 else 0.0),
        ground_states=ground,
        degenerate_boundary=boundary,
    )


def saturation_field(j_aa: float, j_ab: float) -> float:
    """Field of the level crossing into the fully polarized trimer state.

    With the monomer saturated (m_b = 1/2) the crossing gamma_a = 3 j_aa / 2
    translates to H_s = 3 j_aa / 2 - j_ab.
    """
    if not j_aa > 0.0:
        raise ValueError("j_aa must be positive")
    return 1.5 * j_aa - j_ab


def detect_plateaus(curve, tol: float):
    """Maximal runs of at least 3 points sitting on a multiple of 1/6.

    ``curve`` is a list of (x, m) pairs sorted in x; returns Plateau tuples
    (x_start, x_end, level).
    """
    if not 0.0 < tol < 1.0 / 12.0:
        raise ValueError("tol must lie in (0, 1/12)")
    xs = [p[0] for p in curve]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("curve must be sorted in x")

    plateaus = []
    run = []
    run_level = None
    for x, m in curve:
        k = round(6.0 * m)
        member = abs(m - k / 6.0) < tol
        if member and (run_level is None or k == run_level):
            run.append(x)
            run_level = k
            continue
        if len(run) >= 3:
            plateaus.append(Plateau(run[0], run[-1], run_level / 6.0))
        run = [x] if member else []
        run_level = k if member else None
    if len(run) >= 3:
        plateaus.append(Plateau(run[0], run[-1], run_level / 6.0))
    return plateaus
