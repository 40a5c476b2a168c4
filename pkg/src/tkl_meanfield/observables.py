"""Thermodynamic observables along the self-consistent equilibrium branch.

All derivatives are central differences of re-solved equilibria, so the
implicit field and temperature dependence of the magnetizations is included;
perturbed solves are seeded from the unperturbed solution to stay on the
same branch.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import DivergenceNearTc
from .mean_field import (
    ModelParams,
    SolverConfig,
    select_equilibrium,
    solve_self_consistent,
)
from .trimer import _check_t


class Derivative(NamedTuple):
    """Central-difference estimate with its two one-sided slopes."""

    value: float
    left: float
    right: float

    @property
    def flagged(self) -> bool:
        # one-sided slopes disagreeing by >10% mark a jump in the curve
        scale = max(abs(self.left), abs(self.right), 1e-300)
        return abs(self.left - self.right) > 0.1 * scale


@dataclass(frozen=True)
class ObservablePoint:
    params: ModelParams
    t: float
    m_a: float
    m_b: float
    chi_a: float
    u: float
    c: float
    chi_flagged: bool = False
    c_flagged: bool = False


def _equilibrium(params, t, config):
    return select_equilibrium(solve_self_consistent(params, t, config))


def _seeded(config, state):
    return replace(config, seeds=((state.m_a, state.m_b),))


def default_field_step(h: float) -> float:
    return max(1e-6, 1e-4 * max(1.0, abs(h)))


def susceptibility_estimate(
    params: ModelParams, t: float, step: float = None, config: SolverConfig = None
) -> Derivative:
    """d m_a / dH by re-solved central difference, with one-sided slopes."""
    _check_t(t)
    if config is None:
        config = SolverConfig()
    if step is None:
        step = default_field_step(params.h)
    if not step > 0.0:
        raise ValueError("step must be positive")
    base = _equilibrium(params, t, config)
    seeded = _seeded(config, base)
    m_plus = _equilibrium(replace(params, h=params.h + step), t, seeded).m_a
    m_minus = _equilibrium(replace(params, h=params.h - step), t, seeded).m_a
    return Derivative(
        value=(m_plus - m_minus) / (2.0 * step),
        left=(base.m_a - m_minus) / step,
        right=(m_plus - base.m_a) / step,
    )


def susceptibility(
    params: ModelParams, t: float, step: float = None, config: SolverConfig = None
) -> float:
    return susceptibility_estimate(params, t, step, config).value


def zero_field_susceptibility(
    params: ModelParams, t: float, step: float = 1e-6, config: SolverConfig = None
) -> float:
    """Susceptibility at H = 0 on the branch seeded from zero magnetization.

    Raises DivergenceNearTc when the two-sided difference exceeds 1e6, which
    happens below the ordering temperature where the zero branch is unstable.
    """
    _check_t(t)
    if config is None:
        config = SolverConfig()
    seeded = replace(config, seeds=((0.0, 0.0),))
    m_plus = _equilibrium(replace(params, h=step), t, seeded).m_a
    m_minus = _equilibrium(replace(params, h=-step), t, seeded).m_a
    chi = (m_plus - m_minus) / (2.0 * step)
    if abs(chi) > 1e6:
        raise DivergenceNearTc(chi)
    return chi


def internal_energy(
    params: ModelParams, t: float, step: float = 1e-3, config: SolverConfig = None
) -> float:
    """u = -T^2 d(F/T)/dT per site along the equilibrium branch.

    ``step`` is relative: the temperature difference uses delta = step * t.
    """
    _check_t(t)
    if not 0.0 < step < 1.0:
        raise ValueError("relative step must lie in (0, 1)")
    if config is None:
        config = SolverConfig()
    base = _equilibrium(params, t, config)
    seeded = _seeded(config, base)
    delta = step * t
    g_plus = _equilibrium(params, t + delta, seeded).free_energy_per_site / (t + delta)
    g_minus = _equilibrium(params, t - delta, seeded).free_energy_per_site / (t - delta)
    return -t * t * (g_plus - g_minus) / (2.0 * delta)


def specific_heat_estimate(
    params: ModelParams, t: float, step: float = 1e-3, config: SolverConfig = None
) -> Derivative:
    """c = du/dT by central difference of the internal energy."""
    _check_t(t)
    delta = step * t
    u0 = internal_energy(params, t, step, config)
    u_plus = internal_energy(params, t + delta, step, config)
    u_minus = internal_energy(params, t - delta, step, config)
    return Derivative(
        value=(u_plus - u_minus) / (2.0 * delta),
        left=(u0 - u_minus) / delta,
        right=(u_plus - u0) / delta,
    )


def specific_heat(
    params: ModelParams, t: float, step: float = 1e-3, config: SolverConfig = None
) -> float:
    return specific_heat_estimate(params, t, step, config).value


def specific_heat_curvature(
    params: ModelParams, t: float, step: float = 1e-3, config: SolverConfig = None
) -> float:
    """The equivalent curvature form c = -T d^2(F per site)/dT^2."""
    _check_t(t)
    if config is None:
        config = SolverConfig()
    base = _equilibrium(params, t, config)
    seeded = _seeded(config, base)
    delta = step * t
    f_plus = _equilibrium(params, t + delta, seeded).free_energy_per_site
    f_minus = _equilibrium(params, t - delta, seeded).free_energy_per_site
    return -t * (f_plus - 2.0 * base.free_energy_per_site + f_minus) / (delta * delta)


def per_site_magnetization(m_a: float, m_b: float) -> float:
    """Full magnetization per lattice site, (2 m_a + m_b) / 3."""
    return (2.0 * m_a + m_b) / 3.0


def observable_point(
    params: ModelParams,
    t: float,
    field_step: float = None,
    temp_step: float = 1e-3,
    config: SolverConfig = None,
) -> ObservablePoint:
    """All observables of one parameter point on the equilibrium branch."""
    if config is None:
        config = SolverConfig()
    state = _equilibrium(params, t, config)
    chi = susceptibility_estimate(params, t, field_step, config)
    c = specific_heat_estimate(params, t, temp_step, config)
    return ObservablePoint(
        params=params,
        t=t,
        m_a=state.m_a,
        m_b=state.m_b,
        chi_a=chi.value,
        u=internal_energy(params, t, temp_step, config),
        c=c.value,
        chi_flagged=chi.flagged,
        c_flagged=c.flagged,
    )
