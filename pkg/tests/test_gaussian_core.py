import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussep.channels import apply_channel, loss
from gaussep.exceptions import GaussepError, UnphysicalError
from gaussep.gaussian_core import (
    GaussianState,
    apply_symplectic,
    beamsplitter,
    direct_sum,
    embed,
    is_physical,
    is_symplectic,
    omega,
    random_pure_state,
    rotation,
    squeezer,
    symplectic_eigenvalues,
    thermal_state,
    two_mode_squeezed_vacuum,
    two_mode_squeezer,
    vacuum_state,
)


def test_omega_single_mode():
    assert np.array_equal(omega(1), [[0, 1], [-1, 0]])
    W = omega(3)
    assert np.array_equal(W @ W, -np.eye(6))


def test_vacuum_covariances():
    assert np.array_equal(vacuum_state(1).cov, np.diag([0.5, 0.5]))
    assert np.array_equal(vacuum_state(2).cov, 0.5 * np.eye(4))


@pytest.mark.parametrize("m", [0, -1, 1.5])
def test_vacuum_rejects_bad_mode_count(m):
    with pytest.raises(GaussepError):
        vacuum_state(m)


def test_tmsv_reference_entries():
    cov = two_mode_squeezed_vacuum(1.0).cov
    assert cov[0, 0] == pytest.approx(1.8810979, abs=1e-7)
    assert cov[3, 3] == pytest.approx(1.8810979, abs=1e-7)
    assert abs(cov[0, 2]) == pytest.approx(1.8134302, abs=1e-7)
    assert cov[1, 3] == pytest.approx(-cov[0, 2], abs=1e-15)


def test_tmsv_zero_is_vacuum():
    assert np.allclose(two_mode_squeezed_vacuum(0.0).cov, 0.5 * np.eye(4), atol=0)


def test_tmsv_rejects_negative_squeezing():
    with pytest.raises(GaussepError):
        two_mode_squeezed_vacuum(-0.1)


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.5, 5.0])
def test_tmsv_is_pure(r):
    s = two_mode_squeezed_vacuum(r)
    assert np.allclose(symplectic_eigenvalues(s.cov), [0.5, 0.5], atol=1e-9)


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.0, 3.0])
def test_tmsv_determinant(r):
    # entries of size cosh(2r)/2 carry rounding of order eps*cosh(2r)^2 into det
    assert np.linalg.det(two_mode_squeezed_vacuum(r).cov) == pytest.approx(0.5**4, rel=1e-9)


def test_symplectic_eigenvalue_references():
    assert np.allclose(symplectic_eigenvalues(vacuum_state(1).cov), [0.5])
    assert np.allclose(symplectic_eigenvalues(thermal_state(1.3).cov), [1.3])
    nu = symplectic_eigenvalues(direct_sum(thermal_state(2.0), thermal_state(0.7)).cov)
    assert np.allclose(nu, [0.7, 2.0])


def test_is_physical_references():
    assert is_physical(vacuum_state(1).cov)
    assert not is_physical(np.diag([0.4, 0.4]))
    assert is_physical(np.diag([np.exp(-2) / 2, np.exp(2) / 2]))


def test_state_validation():
    with pytest.raises(UnphysicalError):
        GaussianState(np.diag([0.4, 0.4]))
    with pytest.raises(GaussepError):
        GaussianState(np.array([[1.0, 0.2], [0.1, 1.0]]))
    with pytest.raises(GaussepError):
        GaussianState(np.eye(3))
    with pytest.raises(GaussepError):
        GaussianState(np.eye(2), mean=np.zeros(3))


def test_state_arrays_are_read_only():
    s = vacuum_state(1)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 3.0


def test_reduced_tmsv_is_thermal():
    r = 0.8
    red = two_mode_squeezed_vacuum(r).reduced([1])
    assert np.allclose(red.cov, np.cosh(2 * r) / 2 * np.eye(2))
    assert not red.is_pure()


def test_apply_identity_leaves_state_unchanged():
    s = random_pure_state(2, seed=3)
    assert np.array_equal(apply_symplectic(s, np.eye(4)).cov, s.cov)


def test_balanced_beamsplitter_keeps_vacuum():
    out = apply_symplectic(vacuum_state(2), beamsplitter(0.5))
    assert np.allclose(out.cov, 0.5 * np.eye(4), atol=1e-15)


def test_beamsplitter_limits():
    assert np.allclose(beamsplitter(0.0), np.eye(4))
    B = beamsplitter(1.0)
    # full reflection swaps the modes with one sign flip
    assert np.allclose(np.abs(B), np.abs(np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])))
    assert np.isclose(np.linalg.det(B[:2, 2:]) * np.linalg.det(B[2:, :2]), 1.0)


@pytest.mark.parametrize("l", [k / 10 for k in range(11)])
def test_beamsplitter_symplectic_grid(l):
    B = beamsplitter(l)
    assert np.max(np.abs(B @ omega(2) @ B.T - omega(2))) <= 1e-12


@pytest.mark.parametrize("l", [0.0, 0.3, 0.5, 0.9, 1.0])
def test_beamsplitter_dilation_matches_loss(l):
    s = random_pure_state(1, seed=11)
    joint = apply_symplectic(direct_sum(s, vacuum_state(1)), beamsplitter(l))
    assert np.max(np.abs(joint.reduced([0]).cov - apply_channel(loss(l), s, 0).cov)) <= 1e-12


def test_repeated_beamsplitter_loss_composition():
    s = random_pure_state(1, seed=5)
    env = direct_sum(s, vacuum_state(2))
    first = apply_symplectic(env, beamsplitter(0.5, (0, 1), 3))
    second = apply_symplectic(first, beamsplitter(0.5, (0, 2), 3))
    assert np.allclose(second.reduced([0]).cov, apply_channel(loss(0.75), s, 0).cov, atol=1e-12)


def test_random_pure_state_is_reproducible():
    a = random_pure_state(2, seed=42).cov
    b = random_pure_state(2, seed=42).cov
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, random_pure_state(2, seed=43).cov)


def test_random_pure_state_without_squeezing_is_vacuum():
    assert np.allclose(random_pure_state(3, seed=1, z_max=0.0).cov, 0.5 * np.eye(6), atol=1e-14)


def test_embed_rejects_bad_modes():
    with pytest.raises(GaussepError):
        embed(np.eye(4), (0, 0), 2)
    with pytest.raises(GaussepError):
        embed(np.eye(2), (3,), 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.floats(0.0, 2.0))
def test_random_pure_states_are_pure(m, seed, z_max):
    s = random_pure_state(m, seed=seed, z_max=z_max)
    assert is_physical(s.cov)
    assert np.allclose(symplectic_eigenvalues(s.cov), 0.5, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-np.pi, np.pi),
    st.floats(-2.0, 2.0),
    st.floats(0.0, 1.0),
    st.floats(0.0, 2.0),
)
def test_generators_are_symplectic(theta, z, l, r):
    for S in (
        rotation(theta, 1, 2),
        squeezer(z, 0, 2),
        beamsplitter(l),
        two_mode_squeezer(r),
        beamsplitter(l, (1, 0), 2) @ squeezer(z, 1, 2) @ rotation(theta, 0, 2),
    ):
        assert is_symplectic(S)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.5, 3.0), st.floats(0.5, 3.0), st.floats(-1.5, 1.5), st.floats(0.0, 1.0))
def test_symplectics_preserve_spectrum(seed, nu1, nu2, z, l):
    base = direct_sum(thermal_state(nu1), thermal_state(nu2))
    S = beamsplitter(l) @ squeezer(z, 0, 2) @ two_mode_squeezer(abs(z) / 2)
    rng = np.random.default_rng(seed)
    S = rotation(rng.uniform(0, 2 * np.pi), 1, 2) @ S
    out = apply_symplectic(base, S)
    assert np.allclose(symplectic_eigenvalues(out.cov), sorted([nu1, nu2]), atol=1e-10)


def test_apply_symplectic_moves_mean():
    s = GaussianState(0.5 * np.eye(2), mean=np.array([1.0, 0.0]))
    out = apply_symplectic(s, rotation(np.pi / 2))
    assert np.allclose(out.mean, rotation(np.pi / 2) @ [1.0, 0.0])


def test_apply_symplectic_rejects_non_symplectic():
    with pytest.raises(GaussepError):
        apply_symplectic(vacuum_state(1), np.diag([2.0, 2.0]))
