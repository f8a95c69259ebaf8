import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from susyxyz.errors import ContractError, DomainError
from susyxyz.spinchain import (
    CouplingLine,
    build_sector_basis,
    common_levels,
    project,
    rescaled_spectrum,
    reverse_bits,
    rotate_left,
    spectrum,
    spectrum_csv_rows,
    symmetry_operator,
    xyz_hamiltonian,
    xyz_hamiltonian_full,
)


def test_coupling_line_identity():
    for zeta in (0.0, 0.3, 1.0, 2.5, -0.7):
        c = CouplingLine(zeta)
        assert c.jx * c.jy + c.jx * c.jz + c.jy * c.jz == pytest.approx(0.0, abs=1e-12)


def test_rotate_and_reverse_bits():
    # |-++-+> on 5 sites, site 1 = least significant bit
    bits = 0b10010
    assert rotate_left(bits, 5) == 0b00101
    assert reverse_bits(bits, 5) == 0b01001


def test_translation_symmetry_operator_order():
    n = 5
    T = symmetry_operator("translation", n).toarray()
    acc = np.eye(2 ** n)
    for _ in range(n):
        acc = T @ acc
    assert np.array_equal(acc, np.eye(2 ** n))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_hamiltonian_commutes_with_symmetries(n):
    H = xyz_hamiltonian_full(n, CouplingLine(0.8)).toarray()
    for kind in ("translation", "parity", "spin_reversal"):
        S = symmetry_operator(kind, n).toarray()
        assert np.linalg.norm(H @ S - S @ H) < 1e-12 * max(1.0, np.linalg.norm(H))


def test_sector_dimensions_sum_to_full_space():
    n = 6
    total = 0
    for k in range(n):
        t = np.exp(2j * np.pi * k / n)
        total += build_sector_basis(n, t).dim
    assert total == 2 ** n


def test_n2_susy_sector_energy():
    sector = build_sector_basis(2, -1.0)
    for zeta in (0.0, 1.0, 2.2):
        evals = spectrum(xyz_hamiltonian(2, CouplingLine(zeta), sector))
        assert len(evals) == 1
        assert evals[0] == pytest.approx(3 + zeta ** 2, abs=1e-12)


def _poly_roots_sorted(coeffs):
    return np.sort(np.real(np.roots(coeffs)))


@pytest.mark.parametrize("zeta", [0.6, 1.3, 2.4])
def test_n4_momentum_pi_characteristic_polynomial(zeta):
    # factored spectrum of H_4 at momentum pi:
    # (E - (z^2+3)) (E - (z^2+2z+5)) (E - (z^2-2z+5)) (E - 2(z^2+1))
    sector = build_sector_basis(4, -1.0)
    evals = spectrum(xyz_hamiltonian(4, CouplingLine(zeta), sector))
    expected = np.sort(
        [zeta ** 2 + 3, zeta ** 2 + 2 * zeta + 5, zeta ** 2 - 2 * zeta + 5, 2 * (zeta ** 2 + 1)]
    )
    assert np.allclose(np.sort(evals), expected, atol=1e-10)


@pytest.mark.parametrize("zeta", [0.6, 1.3, 2.4])
def test_n4_momentum_zero_characteristic_polynomial(zeta):
    # (E-4)(E-(z-1)^2)(E-(z+1)^2)(E^3 - 3E^2(z^2+3) + 2E(z^2+3)^2 + 8(z^2-1)^2);
    # the cubic is the rescaling E = 4 eps, 2y^2+1 = (z^2+3)/4 of the
    # Neveu-Schwarz factor eps^3 - 3eps^2(2y^2+1) + 2eps(2y^2+1)^2 + 8y^4
    sector = build_sector_basis(4, 1.0)
    evals = spectrum(xyz_hamiltonian(4, CouplingLine(zeta), sector))
    cubic = [1.0, -3 * (zeta ** 2 + 3), 2 * (zeta ** 2 + 3) ** 2, 8 * (zeta ** 2 - 1) ** 2]
    expected = np.sort(
        np.concatenate(
            [[4.0, (zeta - 1) ** 2, (zeta + 1) ** 2], _poly_roots_sorted(cubic)]
        )
    )
    assert np.allclose(np.sort(evals), expected, atol=1e-8)


def test_spectrum_requires_square_hermitian():
    dom = build_sector_basis(3, 1.0)
    cod = build_sector_basis(4, -1.0)
    rect = project(symmetry_operator("translation", 3), dom)
    M = rect.matrix
    bad = type(rect)(domain=dom, codomain=dom, matrix=M + 1j * np.triu(np.ones_like(M)))
    with pytest.raises(ContractError):
        spectrum(bad)


def test_rescaled_spectrum_scaling():
    sector = build_sector_basis(4, -1.0)
    zeta = 0.9
    eps = rescaled_spectrum(4, zeta, sector)
    raw = spectrum(xyz_hamiltonian(4, CouplingLine(zeta), sector))
    assert np.allclose(eps, 4 * raw / (3 + zeta ** 2))
    # the supersymmetric level 3 + zeta^2 rescales to 4 exactly
    assert np.any(np.abs(eps - 4.0) < 1e-10)


@given(
    st.lists(st.floats(-5, 5), min_size=0, max_size=8),
    st.lists(st.floats(-5, 5), min_size=0, max_size=8),
)
@settings(max_examples=50, deadline=None)
def test_common_levels_partition(e1, e2):
    matched, only1, only2 = common_levels(e1, e2, tol=1e-9)
    assert len(matched) + len(only1) == len(e1)
    assert len(matched) + len(only2) == len(e2)
    assert sorted(only1 + [a for a, _ in matched]) == pytest.approx(sorted(e1))


def test_common_levels_matching():
    matched, only1, only2 = common_levels([1.0, 2.0, 2.0], [2.0, 3.0], tol=1e-8)
    assert matched == [(2.0, 2.0)]
    assert only1 == [1.0, 2.0]
    assert only2 == [3.0]


def test_csv_rows_deterministic():
    rows = spectrum_csv_rows(0.3, 4, "t=-1", np.array([1.0, 2.5]))
    assert rows == [("0.3", "4", "t=-1", "0", "1"), ("0.3", "4", "t=-1", "1", "2.5")]


def test_bad_sector_size():
    sector = build_sector_basis(3, 1.0)
    with pytest.raises(DomainError):
        xyz_hamiltonian(4, CouplingLine(0.2), sector)
