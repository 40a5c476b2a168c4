"""Mean-field treatment of the triangulated kagome Ising-Heisenberg magnet.

Quantum three-spin rings (trimers) coupled through classical Ising sites
(monomers) are reduced to independent clusters in self-consistent effective
fields.  The package solves the coupled magnetization equations, evaluates
thermodynamic observables and pairwise trimer entanglement, and drives
parameter sweeps from a CLI.
"""

__version__ = "0.1.0"

from .errors import (
    BracketFailure,
    DivergenceNearTc,
    InvalidDensityMatrix,
    MissingColumn,
    NoConvergedBranch,
    NonConvergence,
)
from .trimer import (
    EffectiveFields,
    ModelParams,
    TrimerSpectrum,
    build_trimer_hamiltonian,
    monomer_free_energy,
    monomer_partition,
    thermal_density_matrix,
    trimer_eigenvectors,
    trimer_energies,
    trimer_free_energy,
    trimer_partition,
)
from .mean_field import (
    SelfConsistentState,
    SolverConfig,
    effective_fields,
    free_energy_per_site,
    map_m_a,
    map_m_b,
    select_equilibrium,
    solve_self_consistent,
)
from .entanglement import (
    ConcurrenceResult,
    XState,
    concurrence_at,
    concurrence_wootters,
    concurrence_xstate,
    reduced_density_matrix,
)
from .observables import (
    ObservablePoint,
    internal_energy,
    observable_point,
    specific_heat,
    specific_heat_curvature,
    susceptibility,
    zero_field_susceptibility,
)
from .phase import (
    CriticalResult,
    PhaseLabel,
    Plateau,
    concurrence_threshold,
    critical_temperature_linearized,
    critical_temperature_onset,
    detect_plateaus,
    saturation_field,
    zero_temperature_phase,
)
