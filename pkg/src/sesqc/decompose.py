"""Decomposition of unitaries into real symmetric pulse generators.

Any n x n unitary factors as ``U = O1 @ exp(-1j*D) @ O2.T`` with O1, O2
real orthogonal and D real diagonal (:func:`kak_decompose`).  Combining
that with the spectral form of U gives ``U = exp(-1j*A) @ exp(-1j*B) @
exp(+1j*A)`` for a pair of real symmetric generators
(:func:`aba_decompose`), i.e. any unitary runs in three standard-form
pulses.  :func:`compile_unitary` and :func:`compile_hamiltonian` wrap this
into :class:`~sesqc.pulses.PulseSchedule` objects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, OrthogonalityViolation
from .linalg import (
    expm_generator,
    global_phase_fidelity,
    hermitian_eig,
    max_abs,
    require_hermitian,
    require_unitary,
    simultaneous_diag,
    unitary_diagonalize,
)
from .pulses import DeviceParams, PulseSchedule, PulseStep, compile_symmetric_generator

ORTHOGONALITY_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-8
MIN_COMPILE_FIDELITY = 1.0 - 1e-8
SYMMETRIC_SHORTCUT_TOL = 1e-10


@dataclass(frozen=True)
class KAKDecomposition:
    """Factors of ``U = o1 @ diag(exp(-1j*d)) @ o2.T``."""

    o1: np.ndarray
    d: np.ndarray
    o2: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.o1 * np.exp(-1j * self.d)) @ self.o2.T


@dataclass(frozen=True)
class ABADecomposition:
    """Real symmetric generators of ``U = expm(-1j*a) @ expm(-1j*b) @ expm(1j*a)``."""

    a: np.ndarray
    b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        ua = expm_generator(1.0, self.a)
        ub = expm_generator(1.0, self.b)
        return ua @ ub @ ua.conj().T


def _check_real_orthogonal(m: np.ndarray, name: str) -> np.ndarray:
    imag = max_abs(m.imag)
    if imag > ORTHOGONALITY_TOL:
        raise OrthogonalityViolation(
            f"{name} has imaginary part {imag:.3e}; degenerate clusters mishandled?"
        )
    r = np.ascontiguousarray(m.real)
    defect = max_abs(r.T @ r - np.eye(r.shape[0]))
    if defect > ORTHOGONALITY_TOL:
        raise OrthogonalityViolation(
            f"{name} fails orthogonality by {defect:.3e}"
        )
    return r


def kak_decompose(u) -> KAKDecomposition:
    """Split a unitary into real orthogonal factors around a diagonal phase.

    Works through ``chi = U @ U.T``, which is unitary symmetric, so its real
    and imaginary parts commute and share a real orthogonal eigenbasis O1.
    The diagonal of ``O1.T @ chi @ O1`` fixes D (phases halved onto the
    branch (-pi/2, pi/2]), and O2 follows as ``U.T @ O1 @ exp(1j*D)``.
    """
    um = require_unitary(u, name="U")
    chi = um @ um.T
    basis, _, _ = simultaneous_diag(chi.real, chi.imag)
    o1 = _check_real_orthogonal(basis.astype(np.complex128), "O1")
    d2 = np.diagonal(o1.T @ chi @ o1)
    d = -0.5 * np.angle(d2)
    d[d == -np.pi / 2] = np.pi / 2
    o2 = _check_real_orthogonal(um.T @ (o1 * np.exp(1j * d)), "O2")
    kak = KAKDecomposition(o1=o1, d=d, o2=o2)
    residual = max_abs(kak.reconstruct() - um)
    if residual > RECONSTRUCTION_TOL:
        raise DecompositionError(
            f"KAK reconstruction residual {residual:.3e} exceeds {RECONSTRUCTION_TOL}"
        )
    return kak


def _kak_generators(v: np.ndarray, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real symmetric (A, B) with ``V e^{-i lam} V† = e^{-iA} e^{-iB} e^{iA}``.

    The half-angle freedom in the KAK phases is spent making A negative
    semidefinite: D entries on the positive branch are shifted by -pi and
    the matching O2 columns flip sign, which leaves the product unchanged
    (``e^{-i(d - pi)} = -e^{-i d}``).
    """
    kak = kak_decompose(v)
    shift = kak.d > 0
    d = kak.d - np.pi * shift
    o2 = kak.o2 * np.where(shift, -1.0, 1.0)
    a = kak.o1 @ np.diag(d) @ kak.o1.T
    w = kak.o1 @ o2.T
    b = w @ np.diag(lam) @ w.T
    return (a + a.T) / 2.0, (b + b.T) / 2.0


def aba_decompose(u) -> ABADecomposition:
    """Find real symmetric generators A, B with ``U = e^{-iA} e^{-iB} e^{iA}``.

    Uses the spectral form ``U = V e^{-i Lam} V†`` and the KAK factors of V:
    ``A = O1 D O1.T`` and ``B = (O1 O2.T) Lam (O1 O2.T).T``.  The pair is
    not unique; only the reconstruction contract is guaranteed.  This
    implementation reads all phases on non-positive branches (D in
    (-pi, 0], Lam in (-2pi, 0]), so both generators come back negative
    semidefinite.
    """
    um = require_unitary(u, name="U")
    v, lam = unitary_diagonalize(um)
    lam = lam - 2.0 * np.pi * (lam > 0)
    a, b = _kak_generators(v, lam)
    aba = ABADecomposition(a=a, b=b)
    fidelity = global_phase_fidelity(aba.reconstruct(), um)
    if fidelity < MIN_COMPILE_FIDELITY:
        raise DecompositionError(
            f"ABA reconstruction fidelity {fidelity!r} below {MIN_COMPILE_FIDELITY}"
        )
    return aba


def _symmetric_log_generator(um: np.ndarray) -> np.ndarray:
    """Real symmetric G with ``exp(-1j*G) = U`` for symmetric unitary U."""
    us = (um + um.T) / 2.0
    basis, re_vals, im_vals = simultaneous_diag(us.real, us.imag)
    lam = -np.angle(re_vals + 1j * im_vals)
    lam[lam == -np.pi] = np.pi
    g = (basis * lam) @ basis.T
    return (g + g.T) / 2.0


def _aba_steps(a: np.ndarray, b: np.ndarray, device: DeviceParams) -> list[PulseStep]:
    """Execution-order pulses for e^{-iA} e^{-iB} e^{iA} (rightmost first)."""
    return [
        compile_symmetric_generator(-a, device, label="a_dagger"),
        compile_symmetric_generator(b, device, label="b"),
        compile_symmetric_generator(a, device, label="a"),
    ]


def schedule_unitary(schedule: PulseSchedule) -> np.ndarray:
    """Net operator of a schedule: product of step unitaries, steps[0] first."""
    u = np.eye(schedule.n, dtype=np.complex128)
    for step in schedule.steps:
        u = expm_generator(step.theta, step.k) @ u
    return u


def compile_unitary(u, device: DeviceParams | None = None) -> PulseSchedule:
    """Compile an arbitrary unitary into at most three standard-form pulses.

    Symmetric unitaries (max|U - U.T| <= 1e-10) take a one-step shortcut
    through their real symmetric logarithm; everything else goes through
    :func:`aba_decompose` and emits three steps.  The compiled schedule is
    verified against ``u`` to global-phase fidelity 1 - 1e-8.
    """
    device = device or DeviceParams()
    um = require_unitary(u, name="U")
    n = um.shape[0]
    if max_abs(um - um.T) <= SYMMETRIC_SHORTCUT_TOL:
        steps = [compile_symmetric_generator(_symmetric_log_generator(um), device, label="symmetric")]
    else:
        aba = aba_decompose(um)
        steps = _aba_steps(aba.a, aba.b, device)
    schedule = PulseSchedule(n=n, steps=tuple(steps), device=device)
    fidelity = global_phase_fidelity(schedule_unitary(schedule), um)
    if fidelity < MIN_COMPILE_FIDELITY:
        raise DecompositionError(
            f"compiled schedule fidelity {fidelity!r} below {MIN_COMPILE_FIDELITY}"
        )
    return schedule


def compile_hamiltonian(h, t: float, device: DeviceParams | None = None) -> PulseSchedule:
    """Compile the evolution ``exp(-1j*H*t)`` of a Hermitian H.

    Real symmetric Hamiltonians compile to a single pulse with generator
    ``t*H``.  Complex Hermitian ones reuse the KAK route with the phase
    diagonal taken directly as ``t`` times the spectrum of H, avoiding a
    matrix logarithm (and any branch ambiguity) entirely.
    """
    device = device or DeviceParams()
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    hm = require_hermitian(h, name="H")
    n = hm.shape[0]
    v, spectrum = hermitian_eig(hm)
    lam = float(t) * spectrum
    target = (v * np.exp(-1j * lam)) @ v.conj().T
    if max_abs(hm.imag) <= SYMMETRIC_SHORTCUT_TOL:
        steps = [compile_symmetric_generator(float(t) * hm.real, device, label="hamiltonian")]
    else:
        a, b = _kak_generators(v, lam)
        steps = _aba_steps(a, b, device)
    schedule = PulseSchedule(n=n, steps=tuple(steps), device=device)
    fidelity = global_phase_fidelity(schedule_unitary(schedule), target)
    if fidelity < MIN_COMPILE_FIDELITY:
        raise DecompositionError(
            f"Hamiltonian schedule fidelity {fidelity!r} below {MIN_COMPILE_FIDELITY}"
        )
    return schedule
