"""Numerically exact time evolution over the sweep window [-T, T].

Three solvers share one adaptive exponential integrator:

* Schrodinger evolution of a pure state under the Hermitian Hamiltonian,
* non-Hermitian evolution with -i*Gamma_j diagonal decay terms,
* a Lindblad master equation on the three main levels plus one aggregated
  sink level |E>, with jump operators |E><j| at rates gamma_j = 2*Gamma_j.

The sink aggregation is exact for the observables of interest: only the
summed rates enter the main-subspace dynamics, and there is no coherent
coupling to the external states, so the Lindblad main-subspace populations
coincide with |c_j|^2 from the non-Hermitian solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._integrate import STATUS_OK, propagate_linear
from .model import SystemParams

TOL_MIN = 1e-12
TOL_MAX = 1e-4
DEFAULT_SAMPLES = 2001


class IntegrationError(RuntimeError):
    """Raised when the adaptive stepper cannot proceed (step underflow)."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


@dataclass
class StateVector:
    """Pure-state amplitudes over the three main levels."""

    c1: complex
    c2: complex
    c3: complex

    @classmethod
    def basis(cls, level: int) -> "StateVector":
        if level not in (1, 2, 3):
            raise ValueError(f"level must be 1, 2 or 3, got {level}")
        amps = [0.0, 0.0, 0.0]
        amps[level - 1] = 1.0
        return cls(*amps)

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=complex)

    def population_total(self) -> float:
        return float(abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.c3) ** 2)

    def populations(self) -> np.ndarray:
        return np.abs(self.as_array()) ** 2


@dataclass
class DensityMatrix4:
    """Density operator over the main levels |1>,|2>,|3> plus the sink |E>."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {self.data.shape}")

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix4":
        v = np.zeros(4, dtype=complex)
        v[:3] = state.as_array()
        return cls(np.outer(v, v.conj()))

    def validate(self, trace_tol: float = 1e-8, eig_floor: float = -1e-8):
        m = self.data
        scale = max(1.0, float(np.abs(m).max()))
        if float(np.abs(m - m.conj().T).max()) > 1e-10 * scale:
            raise ValueError("density matrix is not Hermitian")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr} is not 1")
        if float(np.linalg.eigvalsh(m).min()) < eig_floor:
            raise ValueError("density matrix has a negative eigenvalue")

    def populations(self) -> np.ndarray:
        """Main-subspace populations (rho_11, rho_22, rho_33)."""
        return np.real(np.diag(self.data)[:3]).copy()

    def sink_population(self) -> float:
        return float(self.data[3, 3].real)

    def trace(self) -> float:
        return float(np.trace(self.data).real)


@dataclass
class PropagationResult:
    """Final state plus a uniformly sampled trajectory and step statistics.

    ``norm`` holds the total main-subspace population for state propagation
    and the full trace for density-matrix propagation.  Trajectory arrays
    are None when sampling was disabled.
    """

    final_state: Optional[StateVector]
    final_density: Optional[DensityMatrix4]
    times: Optional[np.ndarray]
    populations: Optional[np.ndarray]
    norm: Optional[np.ndarray]
    steps: int
    rejected: int


def _check_tol(tol: float):
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise ValueError(f"tol must lie in [{TOL_MIN}, {TOL_MAX}], got {tol}")


def _coupling_block(params: SystemParams) -> np.ndarray:
    a12 = params.omega12 * np.exp(-1j * params.phi12)
    a13 = params.omega13 * np.exp(-1j * params.phi13)
    a23 = params.omega23 * np.exp(-1j * params.phi23)
    return np.array(
        [
            [0.0, a12, a13],
            [np.conj(a12), params.delta, a23],
            [np.conj(a13), np.conj(a23), 0.0],
        ],
        dtype=complex,
    )


def _state_generator(params: SystemParams, dissipative: bool):
    const = _coupling_block(params)
    if dissipative:
        const = const - 1j * np.diag([params.gamma1, params.gamma2, params.gamma3])
    slope = params.kappa * np.diag([-1.0, 0.0, 1.0]).astype(complex)
    return -1j * const, -1j * slope


def lindblad_generator(params: SystemParams):
    """Constant and slope parts of the 16x16 Liouvillian (row-major vec)."""
    h_const = np.zeros((4, 4), dtype=complex)
    h_const[:3, :3] = _coupling_block(params)
    h_slope = np.diag([-params.kappa, 0.0, params.kappa, 0.0]).astype(complex)
    eye = np.eye(4, dtype=complex)

    def commutator_part(h):
        return -1j * (np.kron(h, eye) - np.kron(eye, h.T))

    l_const = commutator_part(h_const)
    l_slope = commutator_part(h_slope)
    for j, gamma in enumerate((params.gamma1, params.gamma2, params.gamma3)):
        rate = 2.0 * gamma
        if rate == 0.0:
            continue
        jump = np.zeros((4, 4), dtype=complex)
        jump[3, j] = 1.0
        jj = jump.conj().T @ jump
        l_const += rate * (
            np.kron(jump, jump.conj())
            - 0.5 * (np.kron(jj, eye) + np.kron(eye, jj.T))
        )
    return l_const, l_slope


def _run(g0, g1, y0, horizon, tol, n_samples):
    sample_ts = np.linspace(-horizon, horizon, n_samples) if n_samples else None
    out = propagate_linear(g0, g1, y0, -horizon, horizon, tol, sample_ts)
    if out["status"] != STATUS_OK:
        raise IntegrationError(
            f"step size underflow at t={out['t_fail']:.6g}", out["t_fail"]
        )
    return out, sample_ts


def _propagate_state(params, initial, tol, n_samples, dissipative):
    _check_tol(tol)
    if abs(initial.population_total() - 1.0) > 1e-8:
        raise ValueError("initial state must be normalized to 1")
    g0, g1 = _state_generator(params, dissipative)
    out, ts = _run(g0, g1, initial.as_array(), params.horizon, tol, n_samples)
    y = out["y"]
    final = StateVector(y[0], y[1], y[2])
    if n_samples:
        pops = np.abs(out["samples"]) ** 2
        norm = pops.sum(axis=1)
    else:
        pops = norm = None
    return PropagationResult(
        final_state=final,
        final_density=None,
        times=ts,
        populations=pops,
        norm=norm,
        steps=out["steps"],
        rejected=out["rejected"],
    )


def propagate_schrodinger(
    params: SystemParams,
    initial: StateVector,
    tol: float = 1e-10,
    n_samples: int = DEFAULT_SAMPLES,
) -> PropagationResult:
    """Integrate i dc/dt = H(t) c from -T to +T (decay rates ignored)."""
    return _propagate_state(params, initial, tol, n_samples, dissipative=False)


def propagate_nonhermitian(
    params: SystemParams,
    initial: StateVector,
    tol: float = 1e-10,
    n_samples: int = DEFAULT_SAMPLES,
) -> PropagationResult:
    """Integrate i dc/dt = H_D(t) c; the norm decays monotonically."""
    return _propagate_state(params, initial, tol, n_samples, dissipative=True)


def propagate_lindblad(
    params: SystemParams,
    initial: DensityMatrix4,
    tol: float = 1e-10,
    n_samples: int = DEFAULT_SAMPLES,
) -> PropagationResult:
    """Integrate the master equation on the 4-level space (main + sink).

    Jump operators |E><j| act at rates gamma_j = 2*Gamma_j, so this solver
    and the non-Hermitian one describe the same physics; the total trace is
    conserved, with population accumulating in the sink.
    """
    _check_tol(tol)
    initial.validate()
    g0, g1 = lindblad_generator(params)
    out, ts = _run(g0, g1, initial.data.reshape(16), params.horizon, tol, n_samples)
    rho = out["y"].reshape(4, 4)
    rho = 0.5 * (rho + rho.conj().T)
    final = DensityMatrix4(rho)
    if n_samples:
        mats = out["samples"].reshape(-1, 4, 4)
        diag = np.real(np.einsum("nii->ni", mats))
        pops = diag[:, :3]
        norm = diag.sum(axis=1)
    else:
        pops = norm = None
    return PropagationResult(
        final_state=None,
        final_density=final,
        times=ts,
        populations=pops,
        norm=norm,
        steps=out["steps"],
        rejected=out["rejected"],
    )


def transfer_efficiency(params: SystemParams, tol: float = 1e-10) -> float:
    """Final population of level 3 starting from level 1 at t = -T.

    Uses the non-Hermitian solver, which reduces to the Schrodinger one
    when all decay rates vanish.
    """
    result = propagate_nonhermitian(params, StateVector.basis(1), tol, n_samples=0)
    p3 = abs(result.final_state.c3) ** 2
    return float(min(max(p3, 0.0), 1.0))
