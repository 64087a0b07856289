"""KAK / three-pulse decomposition and unitary compiler tests."""

import numpy as np
import pytest

import golden
from sesqc.decompose import (
    aba_decompose,
    compile_hamiltonian,
    compile_unitary,
    kak_decompose,
    schedule_unitary,
)
from sesqc.errors import NotHermitian, NotUnitary
from sesqc.linalg import (
    expm_generator,
    global_phase_fidelity,
    max_abs,
    random_unitary,
)
from sesqc.pulses import DeviceParams, PulseSchedule, PulseStep


def expm_series(m, terms=60):
    out = np.eye(m.shape[0], dtype=np.complex128)
    term = np.eye(m.shape[0], dtype=np.complex128)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def random_orthogonal(n, rng):
    o, r = np.linalg.qr(rng.normal(size=(n, n)))
    return o * np.sign(np.diagonal(r))


def assert_valid_kak(u, kak, atol=1e-8):
    n = u.shape[0]
    np.testing.assert_allclose(kak.o1.T @ kak.o1, np.eye(n), atol=atol)
    np.testing.assert_allclose(kak.o2.T @ kak.o2, np.eye(n), atol=atol)
    assert kak.o1.dtype == np.float64 and kak.o2.dtype == np.float64
    assert np.all(kak.d > -np.pi / 2) and np.all(kak.d <= np.pi / 2)
    np.testing.assert_allclose(kak.reconstruct(), u, atol=atol)


# ---------------------------------------------------------------------------
# kak_decompose


@pytest.mark.parametrize("n", [2, 3, 5, 8, 12])
def test_kak_random_unitary(n):
    rng = np.random.default_rng(500 + n)
    u = random_unitary(n, rng)
    assert_valid_kak(u, kak_decompose(u))


def test_kak_phase_gate():
    u = np.diag([1.0, 1j])
    kak = kak_decompose(u)
    assert_valid_kak(u, kak, atol=1e-12)
    # chi = diag(1, -1), so the half-angles are 0 and pi/2 in some order
    np.testing.assert_allclose(np.sort(kak.d), [0.0, np.pi / 2], atol=1e-12)


def test_kak_identity():
    kak = kak_decompose(np.eye(4))
    assert max_abs(kak.d) == 0.0
    assert_valid_kak(np.eye(4), kak, atol=1e-12)


def test_kak_real_orthogonal_input():
    """chi = I is totally degenerate; O2 must absorb the whole rotation."""
    rng = np.random.default_rng(501)
    u = random_orthogonal(6, rng).astype(np.complex128)
    kak = kak_decompose(u)
    assert max_abs(kak.d) <= 1e-12
    assert_valid_kak(u, kak, atol=1e-10)


def test_kak_symmetric_unitary():
    rng = np.random.default_rng(502)
    g = rng.normal(size=(5, 5))
    g = (g + g.T) / 2
    u = expm_generator(1.0, g)  # symmetric unitary
    kak = kak_decompose(u)
    assert_valid_kak(u, kak, atol=1e-9)


def test_kak_repeated_half_angles():
    """Degenerate e^{-2iD} phases exercise the cluster re-diagonalization."""
    rng = np.random.default_rng(503)
    o1 = random_orthogonal(6, rng)
    o2 = random_orthogonal(6, rng)
    d = np.array([0.4, 0.4, 0.4, -1.1, -1.1, 0.9])
    u = (o1 * np.exp(-1j * d)) @ o2.T
    kak = kak_decompose(u)
    assert_valid_kak(u, kak, atol=1e-9)
    np.testing.assert_allclose(np.sort(kak.d), np.sort(d), atol=1e-9)


def test_kak_rejects_nonunitary():
    with pytest.raises(NotUnitary):
        kak_decompose(np.ones((3, 3)))


# ---------------------------------------------------------------------------
# aba_decompose


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_aba_round_trip(n):
    rng = np.random.default_rng(600 + n)
    for _ in range(10):
        u = random_unitary(n, rng)
        aba = aba_decompose(u)
        assert max_abs(aba.a - aba.a.T) <= 1e-12
        assert max_abs(aba.b - aba.b.T) <= 1e-12
        assert global_phase_fidelity(aba.reconstruct(), u) >= 1 - 1e-8


@pytest.mark.parametrize("n", [3, 6])
def test_aba_generators_negative_semidefinite(n):
    """Phases are read on non-positive branches, so A, B <= 0."""
    rng = np.random.default_rng(610 + n)
    for _ in range(10):
        u = random_unitary(n, rng)
        aba = aba_decompose(u)
        assert np.linalg.eigvalsh(aba.a).max() <= 1e-12
        assert np.linalg.eigvalsh(aba.b).max() <= 1e-12


def test_aba_identity():
    aba = aba_decompose(np.eye(5))
    assert max_abs(aba.a) <= 1e-12
    assert max_abs(aba.b) <= 1e-12


def test_aba_reference_unitary():
    """The five-qubit reference pair reconstructs its tabulated unitary.

    Both sides carry four-decimal rounding, so neither passes a strict
    unitarity gate; compare entrywise after aligning the global phase.
    """
    u_a = expm_series(-1j * golden.GENERATOR_A)
    u_b = expm_series(-1j * golden.GENERATOR_B)
    rebuilt = u_a @ u_b @ u_a.conj().T
    phase = np.trace(rebuilt.conj().T @ golden.COMPILED_U)
    aligned = rebuilt * phase / abs(phase)
    assert max_abs(aligned - golden.COMPILED_U) <= 5e-4


# ---------------------------------------------------------------------------
# schedule execution order


def test_schedule_unitary_applies_first_step_first():
    k1 = np.zeros((2, 2))
    k1[0, 1] = k1[1, 0] = 1.0
    k2 = np.diag([1.0, -1.0])
    s1 = PulseStep(k=k1, theta=0.7)
    s2 = PulseStep(k=k2, theta=0.4)
    schedule = PulseSchedule(n=2, steps=(s1, s2), device=DeviceParams())
    expected = expm_generator(0.4, k2) @ expm_generator(0.7, k1)
    np.testing.assert_allclose(schedule_unitary(schedule), expected, atol=1e-14)


# ---------------------------------------------------------------------------
# compile_unitary


@pytest.mark.parametrize("n", [2, 4, 7])
def test_compile_unitary_three_steps(n):
    rng = np.random.default_rng(700 + n)
    u = random_unitary(n, rng)
    schedule = compile_unitary(u)
    assert [s.label for s in schedule.steps] == ["a_dagger", "b", "a"]
    assert global_phase_fidelity(schedule_unitary(schedule), u) >= 1 - 1e-8


def test_compile_unitary_symmetric_one_step():
    rng = np.random.default_rng(701)
    g = rng.normal(size=(6, 6))
    g = (g + g.T) / 2
    u = expm_generator(1.0, g)
    schedule = compile_unitary(u)
    assert len(schedule.steps) == 1
    assert schedule.steps[0].label == "symmetric"
    assert global_phase_fidelity(schedule_unitary(schedule), u) >= 1 - 1e-8


def test_compile_unitary_identity_zero_angle():
    schedule = compile_unitary(np.eye(5))
    assert schedule.total_angle == 0.0


def test_compile_unitary_custom_device():
    rng = np.random.default_rng(702)
    u = random_unitary(3, rng)
    fast = compile_unitary(u, DeviceParams(g_max_mhz_over_2pi=100.0))
    slow = compile_unitary(u, DeviceParams(g_max_mhz_over_2pi=25.0))
    assert fast.total_angle == pytest.approx(slow.total_angle)
    assert fast.duration_ns == pytest.approx(slow.duration_ns / 4.0)


def test_compile_unitary_rejects_nonunitary():
    with pytest.raises(NotUnitary):
        compile_unitary(np.diag([1.0, 0.5]))


# ---------------------------------------------------------------------------
# compile_hamiltonian


def test_compile_hamiltonian_zero():
    schedule = compile_hamiltonian(np.zeros((4, 4)), t=2.0)
    assert schedule.total_angle == 0.0


def test_compile_hamiltonian_real_symmetric_one_step():
    rng = np.random.default_rng(800)
    h = rng.normal(size=(5, 5))
    h = (h + h.T) / 2
    schedule = compile_hamiltonian(h, t=0.9)
    assert len(schedule.steps) == 1
    target = expm_series(-1j * 0.9 * h)
    assert global_phase_fidelity(schedule_unitary(schedule), target) >= 1 - 1e-8


@pytest.mark.parametrize("t", [0.3, 1.3, 4.7])
def test_compile_hamiltonian_complex(t):
    rng = np.random.default_rng(801)
    h = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = (h + h.conj().T) / 2
    schedule = compile_hamiltonian(h, t=t)
    assert len(schedule.steps) == 3
    target = expm_series(-1j * t * h)
    assert global_phase_fidelity(schedule_unitary(schedule), target) >= 1 - 1e-8


def test_compile_hamiltonian_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        compile_hamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]), t=1.0)


def test_compile_hamiltonian_rejects_bad_time():
    with pytest.raises(ValueError):
        compile_hamiltonian(np.eye(3), t=np.inf)
