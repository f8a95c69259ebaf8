"""Staggered hard-core fermion chains with Ramond / Neveu-Schwarz boundaries.

Spinless fermions on a ring with nearest-neighbour exclusion, built from the
supercharge Q = sum_j lambda_j d_j^dag with d_j = (1-n_{j-1}) c_j (1-n_{j+1}).
With period-3 staggered couplings the Hamiltonian commutes with translation
by three sites; the spectral-coincidence harness compares its sectors against
the XYZ chain at momentum 0 or pi under the change of variables
zeta^2 = 1 + 8 y^2. A combinatorial map sends height paths to hard-particle
configurations and motivates theta-function couplings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import w
from .errors import ConfigurationError, DomainError, InvariantViolation
from .spinchain import build_sector_basis, spectrum, xyz_hamiltonian, CouplingLine


@dataclass(frozen=True)
class HardcoreState:
    """Occupied positions (1-based, increasing) with cyclic non-adjacency."""

    n_f: int
    occupied: tuple

    def __post_init__(self):
        occ = self.occupied
        if any(not (1 <= y <= self.n_f) for y in occ) or list(occ) != sorted(set(occ)):
            raise DomainError(
                f"occupied sites must be strictly increasing in 1..{self.n_f}"
            )
        for a, b in zip(occ, occ[1:]):
            if b - a == 1:
                raise DomainError(f"adjacent occupied sites {a},{b}")
        if len(occ) >= 2 and occ[0] == 1 and occ[-1] == self.n_f:
            raise DomainError(f"adjacent occupied sites {self.n_f},1 across the seam")
        if len(occ) == 1 and self.n_f == 1:
            raise DomainError("a single site cannot host a hard-core particle ring")

    @property
    def m(self):
        return len(self.occupied)


def hardcore_count(n_f, m):
    """Number of hard-core configurations: (n_f/(n_f-m)) C(n_f-m, m)."""
    if m == 0:
        return 1
    return n_f * math.comb(n_f - m, m) // (n_f - m)


def hardcore_basis(n_f, m):
    """All m-particle hard-core states on the ring, lexicographically ordered."""
    if not (0 <= m <= n_f // 2):
        raise DomainError(f"need 0 <= m <= n_f/2, got m={m}, n_f={n_f}")
    states = []
    for occ in itertools.combinations(range(1, n_f + 1), m):
        try:
            states.append(HardcoreState(n_f=n_f, occupied=occ))
        except DomainError:
            continue
    if len(states) != hardcore_count(n_f, m):
        raise InvariantViolation(
            f"hard-core count mismatch at n_f={n_f}, m={m}: "
            f"{len(states)} != {hardcore_count(n_f, m)}"
        )
    return states


@dataclass(frozen=True)
class FermionModel:
    """A staggered hard-core fermion ring in a fixed particle-number sector."""

    n_f: int
    couplings: tuple
    boundary: str = "ramond"
    m: int = 0
    t3_sector: int | None = None

    def __post_init__(self):
        if len(self.couplings) != self.n_f:
            raise DomainError("need one coupling per site")
        if any(c == 0 for c in self.couplings):
            raise DomainError("couplings must be nonzero")
        if self.boundary not in ("ramond", "neveu-schwarz"):
            raise DomainError(f"unknown boundary {self.boundary!r}")
        if self.t3_sector not in (None, 1, -1):
            raise DomainError("t3_sector must be +-1 or None")


def staggered_couplings(n_f, y):
    """Period-3 couplings (y, 1, y, y, 1, y, ...)."""
    if n_f % 3 != 0:
        raise DomainError("staggered couplings need n_f to be a multiple of 3")
    if y == 0:
        raise DomainError("couplings must be nonzero")
    return tuple(y if j % 3 in (0, 2) else 1.0 for j in range(n_f))


def y_of_zeta(zeta):
    """Positive solution of zeta^2 = 1 + 8 y^2."""
    if zeta ** 2 < 1.0:
        raise DomainError(
            f"zeta^2 = {zeta ** 2:.6g} < 1: imaginary staggering parameter y"
        )
    return math.sqrt((zeta ** 2 - 1.0) / 8.0)


def _index_map(states):
    return {s.occupied: i for i, s in enumerate(states)}


def creation_matrix(n_f, j, m):
    """Matrix of d_j^dag from the m-particle to the (m+1)-particle basis,
    with the Jordan-Wigner string sign (-1)^(number occupied left of j)."""
    src = hardcore_basis(n_f, m)
    dst = hardcore_basis(n_f, m + 1)
    idx = _index_map(dst)
    D = np.zeros((len(dst), len(src)))
    left = (j - 2) % n_f + 1
    right = j % n_f + 1
    for col, s in enumerate(src):
        occ = set(s.occupied)
        if j in occ or left in occ or right in occ:
            continue
        new = tuple(sorted(occ | {j}))
        string = sum(1 for y in s.occupied if y < j)
        D[idx[new], col] = (-1.0) ** string
    return D


def supercharge_matrix(n_f, couplings, m):
    """Q restricted to the m -> m+1 particle sectors."""
    Q = creation_matrix(n_f, 1, m) * couplings[0]
    for j in range(2, n_f + 1):
        Q = Q + couplings[j - 1] * creation_matrix(n_f, j, m)
    return Q


def fermion_hamiltonian(model):
    """Hamiltonian on the m-particle basis (and T^3 sector, if requested).

    Ramond: H = {Q, Q^dag}; the hop across the seam then carries the string
    sign (-1)^(m-1). Neveu-Schwarz flips the sign of the seam hop term,
    equivalently multiplies its matrix elements by -1 relative to the written
    periodic form, i.e. the seam hop carries (-1)^m.
    """
    n_f, m, lam = model.n_f, model.m, model.couplings
    states = hardcore_basis(n_f, m)
    idx = _index_map(states)
    dim = len(states)
    H = np.zeros((dim, dim))
    bc = 1.0 if model.boundary == "ramond" else -1.0
    for col, s in enumerate(states):
        occ = set(s.occupied)
        # chemical potential / repulsion: sum_j lambda_j^2 (1-n_{j-1})(1-n_{j+1})
        diag = 0.0
        for j in range(1, n_f + 1):
            left = (j - 2) % n_f + 1
            right = j % n_f + 1
            if left not in occ and right not in occ:
                diag += lam[j - 1] ** 2
        H[col, col] += diag
        # hops j -> j+1 (cyclic); allowed when j occupied, j+1 and j+2 empty
        for j in range(1, n_f + 1):
            nxt = j % n_f + 1
            beyond = nxt % n_f + 1
            if j not in occ or nxt in occ or beyond in occ:
                continue
            new = tuple(sorted((occ - {j}) | {nxt}))
            sign = 1.0
            if j == n_f:  # seam hop N_f -> 1
                sign = bc * (-1.0) ** (m - 1)
            amp = lam[j - 1] * lam[nxt - 1] * sign
            H[idx[new], col] += amp
            H[col, idx[new]] += amp
    if model.t3_sector is None:
        return H
    B = t3_sector_basis(n_f, m, model.t3_sector, model.boundary)
    return B.conj().T @ H @ B


def translation_matrix(n_f, m, boundary="ramond"):
    """One-site translation on the m-particle basis.

    Moving the particle at site n_f to site 1 reorders it past the other
    m-1 fermions and picks up the boundary phase (antiperiodic for
    Neveu-Schwarz), giving the seam sign (+-1)(-1)^(m-1).
    """
    states = hardcore_basis(n_f, m)
    idx = _index_map(states)
    T = np.zeros((len(states), len(states)))
    bc = 1.0 if boundary == "ramond" else -1.0
    for col, s in enumerate(states):
        new = tuple(sorted(y % n_f + 1 for y in s.occupied))
        sign = bc * (-1.0) ** (m - 1) if n_f in s.occupied else 1.0
        T[idx[new], col] = sign
    return T


def t3_sector_basis(n_f, m, sigma, boundary="ramond"):
    """Orthonormal basis of the T^3 eigenspace with eigenvalue sigma = +-1.

    T^3 is a signed permutation of the hard-core basis; the eigenvectors are
    built exactly from its orbits (a state contributes iff the accumulated
    sign around its orbit matches sigma^length).
    """
    if n_f % 3 != 0:
        raise DomainError("T^3 sectors need n_f to be a multiple of 3")
    T = translation_matrix(n_f, m, boundary)
    T3 = T @ T @ T
    states = hardcore_basis(n_f, m)
    dim = len(states)
    # signed permutation data
    target = np.argmax(np.abs(T3), axis=0)
    sign = T3[target, np.arange(dim)]
    cols = []
    seen = np.zeros(dim, dtype=bool)
    for start in range(dim):
        if seen[start]:
            continue
        orbit = [start]
        signs = [1.0]
        cur = start
        while True:
            nxt = int(target[cur])
            s = signs[-1] * sign[cur]
            if nxt == start:
                loop_sign = s
                break
            orbit.append(nxt)
            signs.append(s)
            cur = nxt
        for i in orbit:
            seen[i] = True
        L = len(orbit)
        if abs(sigma ** L - loop_sign) > 1e-12:
            continue
        v = np.zeros(dim)
        for k, (i, s) in enumerate(zip(orbit, signs)):
            v[i] = s * sigma ** (-k)
        cols.append(v / np.linalg.norm(v))
    if not cols:
        return np.zeros((dim, 0))
    return np.column_stack(cols)


def fermion_spectrum(n_f, y, m, boundary, sigma):
    model = FermionModel(
        n_f=n_f,
        couplings=staggered_couplings(n_f, y),
        boundary=boundary,
        m=m,
        t3_sector=sigma,
    )
    H = fermion_hamiltonian(model)
    scale = max(1.0, np.linalg.norm(H))
    if np.linalg.norm(H - H.conj().T) > 1e-12 * scale:
        raise InvariantViolation("fermion sector Hamiltonian is not Hermitian")
    return np.linalg.eigvalsh((H + H.conj().T) / 2.0)


def _unique_levels(values, tol):
    out = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > max(tol, tol * abs(v)):
            out.append(float(v))
    return out


def spectral_comparison(m, zeta, variant, tol=1e-8):
    """Set-coincidence report between XYZ and staggered-fermion spectra.

    ramond_vs_kpi: XYZ at N=2m, momentum pi, against 4 H_f (Ramond) at
    N_f=3m in the sector T^3 = (-1)^(m+1); the fermion zero-energy levels
    are absent on the XYZ side. ns_vs_k0: XYZ at N=2m, momentum 0, against
    4 H_f (Neveu-Schwarz) in the sector T^3 = (-1)^m. Multiplicities are
    ignored by design.
    """
    if m < 2:
        raise DomainError("spectral comparison needs m >= 2")
    y = y_of_zeta(zeta)
    n = 2 * m
    n_f = 3 * m
    if variant == "ramond_vs_kpi":
        boundary, momentum, sigma = "ramond", -1.0, (-1) ** (m + 1)
    elif variant == "ns_vs_k0":
        boundary, momentum, sigma = "neveu-schwarz", 1.0, (-1) ** m
    else:
        raise DomainError(f"unknown variant {variant!r}")
    sector = build_sector_basis(n, momentum)
    xyz = spectrum(xyz_hamiltonian(n, CouplingLine(zeta), sector))
    ferm = 4.0 * fermion_spectrum(n_f, y, m, boundary, sigma)

    xyz_u = _unique_levels(xyz, tol)
    ferm_u = _unique_levels(ferm, tol)
    matched, xyz_only, ferm_only = [], [], []
    i = j = 0
    while i < len(xyz_u) and j < len(ferm_u):
        a, b = xyz_u[i], ferm_u[j]
        if abs(a - b) < max(tol, tol * abs(a)):
            matched.append(a)
            i += 1
            j += 1
        elif a < b:
            xyz_only.append(a)
            i += 1
        else:
            ferm_only.append(b)
            j += 1
    xyz_only.extend(xyz_u[i:])
    ferm_only.extend(ferm_u[j:])
    if variant == "ramond_vs_kpi":
        # the conjecture excludes E=0 from the XYZ side
        ferm_only = [v for v in ferm_only if abs(v) > tol]
    return {
        "m": m,
        "zeta": zeta,
        "variant": variant,
        "xyz_levels": [float(v) for v in xyz],
        "fermion_levels": [float(v) for v in ferm],
        "matched": matched,
        "xyz_only": xyz_only,
        "fermion_only": ferm_only,
        "pass": not xyz_only and not ferm_only,
    }


# ---------------------------------------------------------------------------
# path -> hard-particle mapping


def path_to_hardcore(p):
    """Map a height path to a hard-particle configuration and a case tag.

    Each down step at x_j becomes a particle at y_j = x_j + ell + j modulo
    N_f = n + m (origin at y = 0; stored 1-based). The tag classifies how a
    one-site translation of the path acts on the image: (i)/(iii) leave it
    unchanged, (ii)/(iv) translate the particles by three sites.
    """
    n_f = p.n + p.m
    occ = tuple(
        sorted((x + p.ell + j) % n_f + 1 for j, x in enumerate(p.positions, start=1))
    )
    state = HardcoreState(n_f=n_f, occupied=occ)
    last_step_down = p.n in p.positions
    if not last_step_down:
        tag = "ii" if p.ell == 0 else "i"
    else:
        tag = "iii" if p.ell == 2 else "iv"
    return state, tag


def path_translate(p):
    """The path obtained by translating the chain one site to the right.

    The last step is glued to the front; the new base height is reduced to
    {0, 1, 2}, which is a shift by -1 (last step up) or +1 (last step down)
    modulo 3.
    """
    from .eightvertex import PathState

    if p.n in p.positions:
        new_pos = (1,) + tuple(x + 1 for x in p.positions if x != p.n)
        new_ell = (p.ell + 1) % 3
    else:
        new_pos = tuple(x + 1 for x in p.positions)
        new_ell = (p.ell - 1) % 3
    return PathState(ell=new_ell, positions=new_pos, n=p.n)


def theta_couplings(ctx, n_f):
    """Coupling conjecture: lambda_y = |theta_1(w_y, q)|^(3/2), period 3."""
    lams = []
    for y in range(1, n_f + 1):
        val = abs(ctx.theta(1, w(y, ctx))) ** 1.5
        if val < 1e-12:
            raise ConfigurationError(
                f"coupling at site {y} vanishes: w_y is a multiple of pi"
            )
        lams.append(val)
    return tuple(lams)
