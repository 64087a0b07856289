"""Exact schedule execution and projective measurement.

Each pulse step is exponentiated through its eigendecomposition, so there
is no time-stepping error: evolution is exact up to rounding.  Schedules
run in list order — ``steps[0]`` hits the state first.  Measurement in the
qubit basis is multinomial sampling from the occupation probabilities with
a seeded, named RNG.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDensityMatrix
from .linalg import expm_generator, hermitian_eig, max_abs
from .pulses import PulseSchedule, PulseStep
from .stateprep import SESState

DENSITY_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9

RNG_NAME = "numpy-pcg64"


@dataclass(frozen=True)
class DensityMatrixState:
    """Mixed state: Hermitian, positive semidefinite, unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDensityMatrix(f"density matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidDensityMatrix("density matrix has non-finite entries")
        if max_abs(m - m.conj().T) > DENSITY_TOL:
            raise InvalidDensityMatrix("density matrix is not Hermitian")
        trace_err = abs(float(np.trace(m).real) - 1.0) + abs(float(np.trace(m).imag))
        if trace_err > DENSITY_TOL:
            raise InvalidDensityMatrix(f"trace deviates from 1 by {trace_err:.3e}")
        _, eigvals = hermitian_eig((m + m.conj().T) / 2.0)
        if float(eigvals.min()) < EIGENVALUE_FLOOR:
            raise InvalidDensityMatrix(
                f"negative eigenvalue {eigvals.min():.3e} below {EIGENVALUE_FLOOR}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, state: SESState) -> "DensityMatrixState":
        a = state.amplitudes
        return cls(np.outer(a, a.conj()))


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome histogram of repeated qubit-basis measurements."""

    shots: int
    counts: np.ndarray
    seed: int | None
    rng_name: str = RNG_NAME

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64, copy=True)
        if int(c.sum()) != self.shots:
            raise ValueError("counts must sum to shots")
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def occupations(state: SESState | DensityMatrixState) -> np.ndarray:
    """Occupation probabilities of each qubit's excited level."""
    if isinstance(state, SESState):
        return state.weights
    return np.diagonal(state.matrix).real.copy()


def evolve_pure(state: SESState, step: PulseStep) -> SESState:
    if step.n != state.n:
        raise DimensionMismatch(f"step is {step.n}-dimensional, state is {state.n}")
    u = expm_generator(step.theta, step.k)
    return SESState(u @ state.amplitudes)


def evolve_density(rho: DensityMatrixState, step: PulseStep) -> DensityMatrixState:
    if step.n != rho.n:
        raise DimensionMismatch(f"step is {step.n}-dimensional, state is {rho.n}")
    u = expm_generator(step.theta, step.k)
    return DensityMatrixState(u @ rho.matrix @ u.conj().T)


def run_schedule(state: SESState | DensityMatrixState, schedule: PulseSchedule):
    """Apply every step of a schedule in order (``steps[0]`` first)."""
    if not isinstance(state, (SESState, DensityMatrixState)):
        raise TypeError(f"cannot evolve {type(state).__name__}")
    if schedule.n != state.n:
        raise DimensionMismatch(f"schedule is {schedule.n}-dimensional, state is {state.n}")
    evolve = evolve_pure if isinstance(state, SESState) else evolve_density
    for step in schedule.steps:
        state = evolve(state, step)
    return state


def measure(state: SESState | DensityMatrixState, shots: int, seed: int | None = None) -> MeasurementRecord:
    """Sample ``shots`` qubit-basis measurements; reproducible for a fixed seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(occupations(state), 0.0, None)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), p)
    return MeasurementRecord(shots=int(shots), counts=counts, seed=seed)
