"""Length-changing lattice supercharges and the N=(2,2) structure they generate.

The local operator q_j replaces a down spin at site j by a pair ++ (weight
(-1)^{j-1}) or -- (weight -zeta*(-1)^{j-1}), growing the chain by one site;
q_0 creates the pair across the periodic boundary. The supercharge
Q_N = sqrt(N/(N+1)) * sum_j q_j is a well-defined map between the momentum
sectors t_N = (-1)^{N+1} and t_{N+1} = (-1)^{N+2}, squares to zero, and
builds the XYZ Hamiltonian as an anticommutator. The spin-reversed partner
Qt_N = R_{N+1} Q_N R_N completes the algebra; their interplay organizes all
positive-energy states into quadruplets spanning three chain lengths.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, InvariantViolation
from .spinchain import (
    CouplingLine,
    SectorBasis,
    SectorOperator,
    build_sector_basis,
    project,
    spectrum,
    symmetry_operator,
    xyz_hamiltonian,
)


def susy_sector(n, **kwargs):
    """The momentum sector t_N = (-1)^{N+1} on which the supercharges act."""
    return build_sector_basis(n, float((-1) ** (n + 1)), **kwargs)


def local_q(j, n, zeta):
    """Sparse 2^{n+1} x 2^n matrix of the pair-creation operator q_j.

    For 1 <= j <= n the operator acts on a down spin at site j; j = 0 acts on
    a down spin at the last site and creates the pair on sites (n+1, 1).
    """
    if not (0 <= j <= n):
        raise DomainError(f"local charge index must satisfy 0 <= j <= n, got {j}")
    rows, cols, vals = [], [], []
    if j == 0:
        sign = -1.0
        for b in range(1 << n):
            if not (b >> (n - 1)) & 1:
                continue
            body = (b & ((1 << (n - 1)) - 1)) << 1
            rows.append(body)
            vals.append(sign)
            cols.append(b)
            rows.append(body | 1 | (1 << n))
            vals.append(-zeta * sign)
            cols.append(b)
    else:
        string = (-1.0) ** (j - 1)
        low_mask = (1 << (j - 1)) - 1
        for b in range(1 << n):
            if not (b >> (j - 1)) & 1:
                continue
            low = b & low_mask
            rest = b >> j
            base = low | (rest << (j + 1))
            rows.append(base)  # pair ++ at sites (j, j+1)
            vals.append(string)
            cols.append(b)
            rows.append(base | (0b11 << (j - 1)))  # pair -- at sites (j, j+1)
            vals.append(-zeta * string)
            cols.append(b)
    return sp.csr_matrix((vals, (rows, cols)), shape=(1 << (n + 1), 1 << n))


def supercharge_full(n, zeta):
    """Full-space Q_N = sqrt(N/(N+1)) sum_{j=0}^{N} q_j (before sector restriction)."""
    total = sum(local_q(j, n, zeta) for j in range(n + 1))
    return math.sqrt(n / (n + 1)) * total


@dataclass(frozen=True)
class SuperchargePair:
    """Q_N and its spin-reversed partner, restricted to the momentum sectors."""

    n: int
    zeta: float
    q_plain: SectorOperator
    q_tilde: SectorOperator


def build_supercharges(n, zeta):
    """Sector-restricted Q_N and Qt_N = R_{N+1} Q_N R_N."""
    dom = susy_sector(n)
    cod = susy_sector(n + 1)
    Q = supercharge_full(n, zeta)
    R_out = symmetry_operator("spin_reversal", n + 1)
    R_in = symmetry_operator("spin_reversal", n)
    return SuperchargePair(
        n=n,
        zeta=zeta,
        q_plain=project(Q, dom, cod),
        q_tilde=project(R_out @ Q @ R_in, dom, cod),
    )


def _op_norm(M):
    return np.linalg.norm(M)


def verify_anticommutator(n, zeta, tilde=False):
    """Residual of H_N = Q_{N-1} Q_{N-1}^dag + Q_N^dag Q_N on the sector."""
    sector = susy_sector(n)
    H = xyz_hamiltonian(n, CouplingLine(zeta), sector).matrix
    pair_up = build_supercharges(n, zeta)
    A = pair_up.q_tilde.matrix if tilde else pair_up.q_plain.matrix
    rhs = A.conj().T @ A
    if n >= 2:
        pair_dn = build_supercharges(n - 1, zeta)
        B = pair_dn.q_tilde.matrix if tilde else pair_dn.q_plain.matrix
        rhs = rhs + B @ B.conj().T
    return _op_norm(H - rhs)


def verify_algebra(n, zeta):
    """Residuals of the nilpotency and cross relations between Q and Qt.

    Returns a list of {relation, n, zeta, residual, pass} dicts; the adjoint
    halves of each relation are exact transposes and are not repeated.
    """
    up = build_supercharges(n, zeta)
    dn = build_supercharges(n - 1, zeta)
    Q, Qt = up.q_plain.matrix, up.q_tilde.matrix
    q, qt = dn.q_plain.matrix, dn.q_tilde.matrix
    scale = max(1.0, _op_norm(Q) ** 2, _op_norm(Qt) ** 2)
    checks = [
        ("nilpotency_plain", _op_norm(Q @ q)),
        ("nilpotency_tilde", _op_norm(Qt @ qt)),
        ("cross_charge_left", _op_norm(Qt.conj().T @ Q + q @ qt.conj().T)),
        ("cross_charge_right", _op_norm(Q.conj().T @ Qt + qt @ q.conj().T)),
        ("mixed_nilpotency", _op_norm(Qt @ q + Q @ qt)),
        ("hamiltonian_plain", verify_anticommutator(n, zeta, tilde=False)),
        ("hamiltonian_tilde", verify_anticommutator(n, zeta, tilde=True)),
    ]
    return [
        {
            "relation": name,
            "n": n,
            "zeta": zeta,
            "residual": float(r),
            "pass": bool(r < 1e-10 * scale),
        }
        for name, r in checks
    ]


def conserved_charge_C(n, zeta):
    """C_N = Qt_N^dag Q_N, the square-zero charge mapping between quadruplet middles."""
    if n < 2:
        raise DomainError("the conserved charge needs n >= 2")
    pair = build_supercharges(n, zeta)
    sector = susy_sector(n)
    C = pair.q_tilde.matrix.conj().T @ pair.q_plain.matrix
    return SectorOperator(domain=sector, codomain=sector, matrix=C)


def _rank_with_warning(M, context, threshold=1e-10):
    """SVD rank with an honesty check: warn when singular values straddle the cut."""
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    cut = threshold * s[0] if s[0] > 0 else threshold
    rank = int(np.sum(s > cut))
    if 0 < rank < len(s):
        gap = s[rank - 1] / max(s[rank], np.finfo(float).tiny)
        if gap < 10.0:
            warnings.warn(
                f"ill-conditioned rank for {context}: singular values "
                f"{s[rank - 1]:.3e} / {s[rank]:.3e} straddle the threshold",
                stacklevel=3,
            )
    return rank


def cohomology_dimension(n, zeta, threshold=1e-10):
    """dim ker Q_N - rank Q_{N-1} on the momentum sector t_N = (-1)^{N+1}."""
    if n < 2:
        raise DomainError("cohomology needs n >= 2")
    Qn = build_supercharges(n, zeta).q_plain.matrix
    dim = Qn.shape[1]
    rank_n = _rank_with_warning(Qn, f"Q_{n}", threshold)
    rank_dn = _rank_with_warning(
        build_supercharges(n - 1, zeta).q_plain.matrix, f"Q_{n - 1}", threshold
    )
    return dim - rank_n - rank_dn


@dataclass(frozen=True)
class Multiplet:
    """A positive-energy quadruplet (base; two middles; top) across three sizes."""

    energy: float
    base_size: int
    member_ids: tuple  # 1 + 2 + 1 state ids "{n}:{sector}:{index}"


@dataclass(frozen=True)
class MultipletReport:
    n_center: int
    zeta: float
    singlets: tuple  # (n, energy, state id)
    quadruplets: tuple = field(repr=False)

    def coverage(self):
        """Map (size, rounded energy) -> number of quadruplet members there."""
        out = {}
        for m in self.quadruplets:
            for sid in m.member_ids:
                size = int(sid.split(":")[0])
                key = (size, round(m.energy, 8))
                out[key] = out.get(key, 0) + 1
        return out


def _sector_id(n, index):
    tag = "t=+1" if (-1) ** (n + 1) > 0 else "t=-1"
    return f"{n}:{tag}:{index}"


def _eigen_data(n, zeta, zero_tol_scale=1e-9):
    sector = susy_sector(n)
    H = xyz_hamiltonian(n, CouplingLine(zeta), sector).matrix
    evals, evecs = np.linalg.eigh((H + H.conj().T) / 2.0)
    zero_tol = zero_tol_scale * max(1.0, np.linalg.norm(H))
    return sector, evals, evecs, zero_tol


def _group_levels(evals, tol):
    """Indices of (nearly) degenerate eigenvalues grouped together."""
    groups = []
    for i, e in enumerate(evals):
        if groups and abs(e - evals[groups[-1][0]]) < max(tol, tol * abs(e)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _base_subspace(n, zeta, eigvecs, tol):
    """Columns of eigvecs annihilated by both Q_{n-1}^dag and Qt_{n-1}^dag."""
    if n < 2:
        return eigvecs
    dn = build_supercharges(n - 1, zeta)
    stacked = np.vstack([dn.q_plain.matrix.conj().T, dn.q_tilde.matrix.conj().T])
    img = stacked @ eigvecs
    scale = max(np.linalg.norm(stacked), 1.0)
    if eigvecs.shape[1] == 0:
        return eigvecs
    u, s, vh = np.linalg.svd(img, full_matrices=True)
    null_dim = int(np.sum(s < tol * scale)) + max(0, eigvecs.shape[1] - len(s))
    if null_dim == 0:
        return eigvecs[:, :0]
    return eigvecs @ vh.conj().T[:, eigvecs.shape[1] - null_dim:]


def multiplet_report(n_center, zeta, tol=1e-8):
    """Organize all positive-energy sector states at sizes n_center-1, n_center,
    n_center+1 into quadruplets built by explicit supercharge action.

    Quadruplets are anchored on base states (annihilated by both adjoints) at
    every size whose members can reach the scanned window. Raises
    InvariantViolation if any positive-energy state in the window is missed.
    """
    if n_center < 3:
        raise DomainError("multiplet scan needs n_center >= 3")
    window = (n_center - 1, n_center, n_center + 1)
    data = {}
    for k in range(max(2, n_center - 3), n_center + 2):
        data[k] = _eigen_data(k, zeta)

    singlets = []
    counters = {k: 0 for k in data}

    def take_id(size):
        i = counters[size]
        counters[size] += 1
        return _sector_id(size, i)

    # zero-energy singlets first (they occupy the lowest indices)
    for k in window:
        sector, evals, evecs, ztol = data[k]
        for e in evals:
            if abs(e) < ztol:
                singlets.append((k, float(e), take_id(k)))
            else:
                break

    quadruplets = []
    member_count = {k: 0 for k in window}
    for k in sorted(data):
        sector, evals, evecs, ztol = data[k]
        pair_k = build_supercharges(k, zeta)
        pair_k1 = build_supercharges(k + 1, zeta)
        for grp in _group_levels(evals, tol):
            E = float(np.mean(evals[grp]))
            if abs(E) < ztol:
                continue
            base = _base_subspace(k, zeta, evecs[:, grp], tol)
            for col in range(base.shape[1]):
                phi = base[:, col]
                up = pair_k.q_plain.matrix @ phi
                up_t = pair_k.q_tilde.matrix @ phi
                top = pair_k1.q_plain.matrix @ (pair_k.q_tilde.matrix @ phi)
                for v, name in ((up, "Q"), (up_t, "Qt"), (top, "QQt")):
                    if np.linalg.norm(v) < tol:
                        raise InvariantViolation(
                            f"quadruplet member {name} vanished at size {k}, E={E}"
                        )
                ids = []
                for size in (k, k + 1, k + 1, k + 2):
                    if size in window:
                        ids.append(take_id(size))
                        member_count[size] += 1
                    else:
                        ids.append(f"{size}:outside:-")
                quadruplets.append(
                    Multiplet(energy=E, base_size=k, member_ids=tuple(ids))
                )

    for k in window:
        _, evals, _, ztol = data[k]
        positive = int(np.sum(np.abs(evals) >= ztol))
        if member_count[k] != positive:
            raise InvariantViolation(
                f"size {k}: {positive} positive-energy states but "
                f"{member_count[k]} quadruplet members"
            )

    return MultipletReport(
        n_center=n_center,
        zeta=zeta,
        singlets=tuple(singlets),
        quadruplets=tuple(quadruplets),
    )


def parity_covariance_check(n, zeta, tol=1e-8):
    """Check P_{N+1} Q_N = (-1)^{N+1} Q_N P_N on the sectors; for odd n also
    check that the odd-parity spectrum is contained in the even-parity one."""
    dom = susy_sector(n)
    cod = susy_sector(n + 1)
    pair = build_supercharges(n, zeta)
    P_dom = project(symmetry_operator("parity", n), dom).matrix
    P_cod = project(symmetry_operator("parity", n + 1), cod).matrix
    Q = pair.q_plain.matrix
    resid = _op_norm(P_cod @ Q - (-1.0) ** (n + 1) * Q @ P_dom)
    report = {
        "relation": "parity_covariance",
        "n": n,
        "zeta": zeta,
        "residual": float(resid),
        "pass": bool(resid < 1e-10 * max(1.0, _op_norm(Q))),
    }
    if n % 2 == 0:
        return [report]

    ev_odd = spectrum(
        xyz_hamiltonian(n, CouplingLine(zeta), build_sector_basis(n, 1.0, parity=-1))
    )
    ev_even = spectrum(
        xyz_hamiltonian(n, CouplingLine(zeta), build_sector_basis(n, 1.0, parity=+1))
    )
    leftovers = list(ev_even)
    missing = 0
    for e in ev_odd:
        hit = None
        for i, f in enumerate(leftovers):
            if abs(e - f) < max(tol, tol * abs(e)):
                hit = i
                break
        if hit is None:
            missing += 1
        else:
            leftovers.pop(hit)
    report2 = {
        "relation": "odd_parity_spectrum_containment",
        "n": n,
        "zeta": zeta,
        "residual": float(missing),
        "pass": missing == 0,
    }
    return [report, report2]
