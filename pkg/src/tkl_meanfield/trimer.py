"""Exact treatment of one quantum spin-1/2 triangle (trimer) and one Ising
site (monomer) in longitudinal effective fields.

Conventions used across the package:

* the 3-qubit product basis |b1 b2 b3> is ordered by binary index with bit
  value 0 meaning spin up (S_z = +1/2), so index 0 is the fully polarized
  "up" state;
* the closed-form energies are labelled E_1..E_8 as returned by
  :func:`trimer_energies`, and the ket list of :func:`trimer_eigenvectors`
  keeps its conventional labels psi_1..psi_8.  The two labellings use
  opposite up/down conventions, so the stationary state carrying energy E_k
  is the global spin flip of ket k; ``TrimerSpectrum.state_index`` records
  that pairing (1<->8, 2<->5, 3<->6, 4<->7).
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .logdomain import LN2, log_two_cosh, logaddexp

# cube root of unity labelling the chirality doublets
Q = cmath.exp(2j * math.pi / 3.0)

# magnetization quantum number attached to each energy slot E_1..E_8
TOTAL_SZ = (-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5)

# cyclic-shift label of the state carrying each energy slot
SHIFT_LABELS = (1.0 + 0j, Q, Q.conjugate(), 1.0 + 0j, Q, Q.conjugate(), 1.0 + 0j, 1.0 + 0j)

# 1-based ket index (see trimer_eigenvectors) carrying each energy slot
STATE_FOR_ENERGY = (8, 5, 6, 7, 2, 3, 4, 1)


def _check_t(t):
    if not t > 0.0:
        raise ValueError(f"temperature must be strictly positive, got {t}")


@dataclass(frozen=True)
class ModelParams:
    """Couplings and external field in reduced units (k_B = 1, g mu_B = 1).

    j_aa > 0 is antiferromagnetic intra-trimer Heisenberg exchange, j_ab the
    trimer-monomer Ising exchange, h the longitudinal field.
    """

    j_aa: float
    j_ab: float
    h: float = 0.0

    @classmethod
    def from_alpha(cls, j_aa: float, alpha: float, h: float = 0.0) -> "ModelParams":
        """Build from the coupling ratio alpha = j_ab / j_aa."""
        return cls(j_aa=j_aa, j_ab=alpha * j_aa, h=h)

    @property
    def alpha(self) -> float:
        return self.j_ab / self.j_aa


@dataclass(frozen=True)
class EffectiveFields:
    """Variational triple: exchange lambda_aa and the two mean fields."""

    lambda_aa: float
    gamma_a: float
    gamma_b: float


@dataclass(frozen=True)
class TrimerSpectrum:
    """Closed-form trimer levels E_1..E_8 with their quantum labels."""

    energies: tuple
    total_sz: tuple = TOTAL_SZ
    shift_eigenvalue: tuple = SHIFT_LABELS
    state_index: tuple = STATE_FOR_ENERGY


class Partition(NamedTuple):
    """Partition value with its always-finite log-domain companion."""

    value: float
    log_value: float


def trimer_energies(fields: EffectiveFields) -> TrimerSpectrum:
    """Closed-form spectrum of the trimer in the effective field gamma_a."""
    lam = fields.lambda_aa
    g = fields.gamma_a
    e23 = 0.25 * (-3.0 * lam + 2.0 * g)
    e56 = 0.25 * (-3.0 * lam - 2.0 * g)
    energies = (
        0.75 * (lam + 2.0 * g),
        e23,
        e23,
        0.25 * (3.0 * lam + 2.0 * g),
        e56,
        e56,
        0.25 * (3.0 * lam - 2.0 * g),
        0.75 * (lam - 2.0 * g),
    )
    return TrimerSpectrum(energies)


def _build_eigenvectors():
    s = 1.0 / math.sqrt(3.0)
    q = Q
    q2 = Q.conjugate()
    vecs = []
    for spec in (
        {0: 1.0},
        {1: q * s, 2: q2 * s, 4: s},
        {1: q2 * s, 2: q * s, 4: s},
        {1: s, 2: s, 4: s},
        {6: q * s, 5: q2 * s, 3: s},
        {6: q2 * s, 5: q * s, 3: s},
        {6: s, 5: s, 3: s},
        {7: 1.0},
    ):
        v = np.zeros(8, dtype=complex)
        for idx, amp in spec.items():
            v[idx] = amp
        v.flags.writeable = False
        vecs.append(v)
    return tuple(vecs)


_EIGENVECTORS = _build_eigenvectors()


def trimer_eigenvectors():
    """The eight stationary kets psi_1..psi_8 as complex amplitude vectors."""
    return [v.copy() for v in _EIGENVECTORS]


def _spin_matrices():
    sx = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = 0.5 * np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    sz = 0.5 * np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    return sx, sy, sz


def _build_pair_sum():
    sx, sy, sz = _spin_matrices()
    eye = np.eye(2, dtype=complex)
    ops = (sx, sy, sz)

    def at(site, op):
        mats = [eye, eye, eye]
        mats[site] = op
        return np.kron(mats[0], np.kron(mats[1], mats[2]))

    heis = np.zeros((8, 8), dtype=complex)
    for i, j in ((0, 1), (1, 2), (0, 2)):
        for op in ops:
            heis += at(i, op) @ at(j, op)
    assert np.abs(heis.imag).max() < 1e-15
    return heis.real


# Heisenberg pair sum S1.S2 + S2.S3 + S1.S3 on the product basis
HEISENBERG_PAIR_SUM = _build_pair_sum()
HEISENBERG_PAIR_SUM.flags.writeable = False

# total S_z of each basis state: bit value 0 contributes +1/2
SZ_TOTAL_DIAG = np.array([0.5 * (3 - 2 * bin(i).count("1")) for i in range(8)])
SZ_TOTAL_DIAG.flags.writeable = False


def build_trimer_hamiltonian(fields: EffectiveFields) -> np.ndarray:
    """Dense 8x8 matrix of lambda * (pair sum) - gamma_a * total S_z."""
    return fields.lambda_aa * HEISENBERG_PAIR_SUM - fields.gamma_a * np.diag(SZ_TOTAL_DIAG)


def trimer_partition(fields: EffectiveFields, t: float) -> Partition:
    """Trimer partition function, overflow-safe.

    The linear value is +inf when it exceeds the double range; the log-domain
    value is exact throughout.
    """
    _check_t(t)
    lam = fields.lambda_aa
    x = abs(fields.gamma_a) / (2.0 * t)
    logk = logaddexp(LN2 + 1.5 * lam / t, 0.0)  # log(2 exp(3 lam / 2T) + 1)
    shift = max(3.0 * x, logk + x)
    bracket = math.exp(3.0 * x - shift) * (1.0 + math.exp(-6.0 * x)) + math.exp(
        logk + x - shift
    ) * (1.0 + math.exp(-2.0 * x))
    log_z = -0.75 * lam / t + shift + math.log(bracket)
    value = math.exp(log_z) if log_z < 709.0 else math.inf
    return Partition(value, log_z)


def trimer_free_energy(fields: EffectiveFields, t: float) -> float:
    """f = -T log Z for the trimer, computed from the log-domain partition."""
    return -t * trimer_partition(fields, t).log_value


def monomer_partition(gamma_b: float, t: float) -> Partition:
    """Partition function 2 cosh(gamma_b / 2T) of a free Ising site."""
    _check_t(t)
    log_z = log_two_cosh(gamma_b / (2.0 * t))
    value = math.exp(log_z) if log_z < 709.0 else math.inf
    return Partition(value, log_z)


def monomer_free_energy(gamma_b: float, t: float) -> float:
    return -t * monomer_partition(gamma_b, t).log_value


def thermal_density_matrix(fields: EffectiveFields, t: float) -> np.ndarray:
    """Thermal state of the trimer as an 8x8 density matrix.

    Boltzmann weights are shifted by the ground energy before exponentiation,
    so arbitrarily low temperatures stay finite.
    """
    _check_t(t)
    spec = trimer_energies(fields)
    vecs = _EIGENVECTORS
    e0 = min(spec.energies)
    weights = [math.exp(-(e - e0) / t) for e in spec.energies]
    rho = np.zeros((8, 8), dtype=complex)
    for w, idx in zip(weights, spec.state_index):
        v = vecs[idx - 1]
        rho += w * np.outer(v, v.conj())
    rho /= math.fsum(weights)
    if np.abs(rho.imag).max() > 1e-12:
        raise RuntimeError("thermal state acquired a complex residue")
    return rho
