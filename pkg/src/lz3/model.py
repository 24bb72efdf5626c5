"""Model definition for a detuned three-level avoided-crossing sweep.

Two bare energies run linearly in time with opposite slopes (-kappa*t and
+kappa*t) while the middle level sits at a static offset ``delta``.  A cyclic
set of couplings Omega_ij * exp(-i*phi_ij) connects the three states, turning
the bare crossings into avoided crossings.  Decay out of the three-level
subspace is modelled by -i*Gamma_j terms on the diagonal.

Units: hbar = 1; energies are measured in units of a reference coupling
(presets use omega23 = 1) and time in its inverse, so kappa carries units of
energy squared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_TWO_PI = 2.0 * math.pi


@dataclass
class SystemParams:
    """All model parameters of the sweep Hamiltonian and its decay terms.

    kappa    : sweep rate of the two running bare energies, energy^2 (> 0)
    delta    : static energy offset of the middle level
    omega*   : coupling magnitudes, >= 0 (a negative real coupling is
               represented as a phase of pi)
    phi*     : coupling phases, normalized into [0, 2*pi)
    gamma*   : decay rates of the three levels, >= 0
    horizon  : half-duration T > 0; the evolution runs over t in [-T, T]
    """

    kappa: float
    horizon: float
    delta: float = 0.0
    omega12: float = 0.0
    omega23: float = 0.0
    omega13: float = 0.0
    phi12: float = 0.0
    phi23: float = 0.0
    phi13: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    def __post_init__(self):
        for name in (
            "kappa", "horizon", "delta", "omega12", "omega23", "omega13",
            "phi12", "phi23", "phi13", "gamma1", "gamma2", "gamma3",
        ):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        for name in ("omega12", "omega23", "omega13"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("gamma1", "gamma2", "gamma3"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("phi12", "phi23", "phi13"):
            setattr(self, name, float(getattr(self, name)) % _TWO_PI)

    @property
    def phase_combination(self) -> float:
        """The single phase combination phi12 + phi23 - phi13 (mod 2*pi).

        The spectrum depends on the phases only through this value.
        """
        return (self.phi12 + self.phi23 - self.phi13) % _TWO_PI

    def max_coupling(self) -> float:
        return max(self.omega12, self.omega23, self.omega13)


@dataclass
class ComplexMatrix3:
    """A 3x3 complex matrix with a hermiticity tag.

    When ``hermitian`` is set the entries satisfy M[i,j] == conj(M[j,i]) to
    within 1e-14 relative.
    """

    data: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {self.data.shape}")


def hamiltonian_at(params: SystemParams, t: float) -> ComplexMatrix3:
    """Hermitian Hamiltonian at time t.

    Diagonal (-kappa*t, delta, +kappa*t); upper triangle carries
    omega_ij * exp(-i*phi_ij), the lower triangle the conjugates.
    """
    a12 = params.omega12 * np.exp(-1j * params.phi12)
    a13 = params.omega13 * np.exp(-1j * params.phi13)
    a23 = params.omega23 * np.exp(-1j * params.phi23)
    kt = params.kappa * t
    m = np.array(
        [
            [-kt, a12, a13],
            [np.conj(a12), params.delta, a23],
            [np.conj(a13), np.conj(a23), kt],
        ],
        dtype=complex,
    )
    return ComplexMatrix3(m, hermitian=True)


def dissipative_hamiltonian_at(params: SystemParams, t: float) -> ComplexMatrix3:
    """Non-Hermitian Hamiltonian: hamiltonian_at minus i*diag(gamma1..3)."""
    m = hamiltonian_at(params, t).data
    m[0, 0] -= 1j * params.gamma1
    m[1, 1] -= 1j * params.gamma2
    m[2, 2] -= 1j * params.gamma3
    lossless = params.gamma1 == 0.0 and params.gamma2 == 0.0 and params.gamma3 == 0.0
    return ComplexMatrix3(m, hermitian=lossless)


def char_poly_coeffs(params: SystemParams, t):
    """Coefficients (c3, c2, c1, c0) of det(lambda*I - H(t)), c3 = 1.

    Evaluated from the closed form, so the phase dependence enters exactly
    and only through cos(phi12 + phi23 - phi13).  Decay rates are ignored
    (Hermitian case).  ``t`` may be a scalar or an ndarray; c1 and c0
    broadcast with it.
    """
    t = np.asarray(t, dtype=float)
    o12sq = params.omega12 * params.omega12
    o23sq = params.omega23 * params.omega23
    o13sq = params.omega13 * params.omega13
    kt = params.kappa * t
    c2 = -params.delta
    c1 = -(o12sq + o23sq + o13sq + kt * kt)
    cos_comb = math.cos(params.phi12 + params.phi23 - params.phi13)
    c0 = (
        -2.0 * params.omega12 * params.omega23 * params.omega13 * cos_comb
        + (o12sq - o23sq) * kt
        + (kt * kt + o13sq) * params.delta
    )
    if t.ndim == 0:
        return 1.0, float(c2), float(c1), float(c0)
    return 1.0, c2, c1 + np.zeros_like(t), c0 + np.zeros_like(t)
