import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from susyxyz.eightvertex import path_states
from susyxyz.elliptic import ThetaContext
from susyxyz.errors import ConfigurationError, DomainError
from susyxyz.fermion import (
    FermionModel,
    HardcoreState,
    creation_matrix,
    fermion_hamiltonian,
    fermion_spectrum,
    hardcore_basis,
    hardcore_count,
    path_to_hardcore,
    path_translate,
    spectral_comparison,
    staggered_couplings,
    supercharge_matrix,
    t3_sector_basis,
    theta_couplings,
    translation_matrix,
    y_of_zeta,
)


def test_hardcore_state_validation():
    HardcoreState(n_f=6, occupied=(1, 3, 5))
    with pytest.raises(DomainError):
        HardcoreState(n_f=6, occupied=(2, 3))
    with pytest.raises(DomainError):
        HardcoreState(n_f=6, occupied=(1, 6))  # adjacent across the seam
    with pytest.raises(DomainError):
        HardcoreState(n_f=6, occupied=(3, 1))


@pytest.mark.parametrize(
    "n_f,m,count", [(6, 2, 9), (3, 1, 3), (6, 3, 2), (9, 3, 30), (12, 4, 105)]
)
def test_hardcore_counts(n_f, m, count):
    assert hardcore_count(n_f, m) == count
    assert len(hardcore_basis(n_f, m)) == count


@given(st.integers(4, 12), st.data())
@settings(max_examples=30, deadline=None)
def test_hardcore_count_formula(n_f, data):
    m = data.draw(st.integers(0, n_f // 2))
    assert len(hardcore_basis(n_f, m)) == hardcore_count(n_f, m)


def test_supercharge_square_zero():
    lam = staggered_couplings(6, 0.7)
    Q1 = supercharge_matrix(6, lam, 1)
    Q2 = supercharge_matrix(6, lam, 2)
    assert np.linalg.norm(Q2 @ Q1) < 1e-14


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_ramond_hamiltonian_is_anticommutator(m):
    n_f = 6
    lam = staggered_couplings(n_f, 0.58)
    H = fermion_hamiltonian(FermionModel(n_f=n_f, couplings=lam, m=m))
    rhs = np.zeros_like(H)
    if m < n_f // 2:
        Q = supercharge_matrix(n_f, lam, m)
        rhs = rhs + Q.T @ Q
    if m > 0:
        Q = supercharge_matrix(n_f, lam, m - 1)
        rhs = rhs + Q @ Q.T
    assert np.linalg.norm(H - rhs) < 1e-12 * max(1.0, np.linalg.norm(H))


@pytest.mark.parametrize("boundary", ["ramond", "neveu-schwarz"])
def test_translation_symmetry(boundary):
    n_f, m = 6, 2
    lam = staggered_couplings(n_f, 0.9)
    H = fermion_hamiltonian(FermionModel(n_f=n_f, couplings=lam, boundary=boundary, m=m))
    T = translation_matrix(n_f, m, boundary)
    T3 = T @ T @ T
    assert np.linalg.norm(T @ T.T - np.eye(len(T))) < 1e-14
    assert np.linalg.norm(H @ T3 - T3 @ H) < 1e-12 * max(1.0, np.linalg.norm(H))


def test_t3_sector_bases_are_orthonormal_eigenbases():
    n_f, m = 6, 2
    for boundary in ("ramond", "neveu-schwarz"):
        T = translation_matrix(n_f, m, boundary)
        T3 = T @ T @ T
        for sigma in (1, -1):
            B = t3_sector_basis(n_f, m, sigma, boundary)
            if B.shape[1] == 0:
                continue
            assert np.linalg.norm(B.conj().T @ B - np.eye(B.shape[1])) < 1e-12
            assert np.linalg.norm(T3 @ B - sigma * B) < 1e-12


@pytest.mark.parametrize("y", [0.37, 0.8, 1.3])
def test_ramond_m2_characteristic_polynomial(y):
    # eps^2 (eps-(1+4y^2)) (eps-(1+2y^2)) (eps^2-(3+4y^2)eps+2(1+2y^2+2y^4))
    ev = fermion_spectrum(6, y, 2, "ramond", -1)
    quad = np.roots([1.0, -(3 + 4 * y * y), 2 * (1 + 2 * y * y + 2 * y ** 4)])
    expected = np.sort(np.real(np.concatenate([[0, 0, 1 + 4 * y * y, 1 + 2 * y * y], quad])))
    assert np.allclose(np.sort(ev), expected, atol=1e-10)


@pytest.mark.parametrize("y", [0.37, 0.8, 1.3])
def test_ns_m2_characteristic_polynomial(y):
    # (eps-1)(eps^3-3eps^2(2y^2+1)+2eps(2y^2+1)^2+8y^4)(eps^2-eps(4y^2+1)+4y^4)
    ev = fermion_spectrum(6, y, 2, "neveu-schwarz", 1)
    cubic = np.roots([1.0, -3 * (2 * y * y + 1), 2 * (2 * y * y + 1) ** 2, 8 * y ** 4])
    quad = np.roots([1.0, -(4 * y * y + 1), 4 * y ** 4])
    expected = np.sort(np.real(np.concatenate([[1.0], cubic, quad])))
    assert np.allclose(np.sort(ev), expected, atol=1e-10)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_two_zero_modes_in_susy_sector(m):
    ev = fermion_spectrum(3 * m, 0.63, m, "ramond", (-1) ** (m + 1))
    assert int(np.sum(np.abs(ev) < 1e-10)) == 2
    assert np.all(ev > -1e-10)  # unbroken supersymmetry: spectrum nonnegative


def test_ns_ground_state_negative():
    # antiperiodic boundaries break the supersymmetry; the ground state dips below 0
    total = []
    for m in range(0, 4):
        total.extend(
            np.linalg.eigvalsh(
                fermion_hamiltonian(
                    FermionModel(n_f=6, couplings=staggered_couplings(6, 0.8),
                                 boundary="neveu-schwarz", m=m)
                )
            )
        )
    assert min(total) < -1e-6


def test_y_of_zeta():
    assert y_of_zeta(3.0) == pytest.approx(1.0)
    assert y_of_zeta(1.0) == 0.0
    with pytest.raises(DomainError):
        y_of_zeta(0.5)


@pytest.mark.parametrize("variant", ["ramond_vs_kpi", "ns_vs_k0"])
@pytest.mark.parametrize("m", [2, 3])
def test_spectral_comparison(variant, m):
    report = spectral_comparison(m, 1.7, variant)
    assert report["pass"], report
    assert report["xyz_only"] == []
    assert report["fermion_only"] == []
    assert set(report) >= {
        "m", "zeta", "variant", "xyz_levels", "fermion_levels",
        "matched", "xyz_only", "fermion_only",
    }


def test_spectral_comparison_ramond_excludes_zero():
    report = spectral_comparison(2, 2.2, "ramond_vs_kpi")
    assert all(abs(v) > 1e-8 for v in report["matched"])
    assert any(abs(v) < 1e-10 for v in report["fermion_levels"])
    assert not any(abs(v) < 1e-8 for v in report["xyz_levels"])


# ---------------------------------------------------------------------------
# paths to hard-particle configurations


def test_path_image_is_hardcore():
    for n in (4, 5, 7):
        for p in path_states(n):
            state, tag = path_to_hardcore(p)
            assert state.n_f == p.n + p.m
            assert state.m == p.m
            assert tag in ("i", "ii", "iii", "iv")


@pytest.mark.parametrize("n,m", [(4, 2), (5, 1), (7, 2), (8, 4), (9, 3), (10, 5)])
def test_path_image_counts(n, m):
    paths = [p for p in path_states(n) if p.m == m]
    images = {path_to_hardcore(p)[0].occupied for p in paths}
    assert len(images) == math.comb(n - 1, m) + 2 * math.comb(n - 1, m - 1)
    # and the image count equals the number of hard-core states
    assert len(images) == hardcore_count(n + m, m)


def test_translation_cases():
    # (i)/(iii): image unchanged; (ii)/(iv): image translated by three sites
    for n in (5, 7):
        for p in path_states(n):
            if p.m == 0:
                continue
            state, tag = path_to_hardcore(p)
            shifted, _ = path_to_hardcore(path_translate(p))
            n_f = state.n_f
            if tag in ("i", "iii"):
                assert shifted.occupied == state.occupied, (p, tag)
            else:
                expected = tuple(sorted((y - 1 + 3) % n_f + 1 for y in state.occupied))
                assert shifted.occupied == expected, (p, tag)


def test_theta_couplings_period_and_dependence():
    ctx_a = ThetaContext(nome=0.3, s=0.4, t=-0.1)
    ctx_b = ThetaContext(nome=0.3, s=0.9, t=-0.6)  # same s + t
    lam_a = theta_couplings(ctx_a, 9)
    lam_b = theta_couplings(ctx_b, 9)
    assert lam_a == pytest.approx(lam_b)
    for j in range(6):
        assert lam_a[j] == pytest.approx(lam_a[j + 3])
    assert all(v > 0 for v in lam_a)


def test_theta_couplings_degenerate_parameters():
    # w_0 is a multiple of pi when s + t = pi, killing a coupling
    ctx = ThetaContext(nome=0.3, s=0.5, t=math.pi - 0.5)
    with pytest.raises(ConfigurationError):
        theta_couplings(ctx, 3)


def test_model_validation():
    lam = staggered_couplings(6, 0.5)
    with pytest.raises(DomainError):
        FermionModel(n_f=6, couplings=lam[:5], m=1)
    with pytest.raises(DomainError):
        FermionModel(n_f=6, couplings=(0.0,) + lam[1:], m=1)
    with pytest.raises(DomainError):
        FermionModel(n_f=6, couplings=lam, boundary="twisted", m=1)
    with pytest.raises(DomainError):
        staggered_couplings(7, 0.5)
