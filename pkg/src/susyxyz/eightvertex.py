"""Eight-vertex transfer matrix, Baxter's path basis, and the Bethe/T-Q machinery.

The transfer matrix is built in the theta parametrization of the zero-field
vertex weights at crossing parameter eta = pi/3, where it commutes with the
XYZ Hamiltonian on the supersymmetric line. On Baxter's path basis the
supersymmetry acts by a purely local move (two up-steps -> one down-step)
with weight (-1)^x h(w_ell)^2, and the Bethe equations admit the root
extension u_{m+1} = pi which lowers the chain length by one site.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import ThetaContext, h, nome_of_zeta, w, zeta_of_nome
from .errors import (
    ConfigurationError,
    DomainError,
    InvariantViolation,
    PoleError,
)
from .spinchain import build_sector_basis
from .supercharge import build_supercharges, susy_sector


# ---------------------------------------------------------------------------
# vertex weights and transfer matrix


@dataclass(frozen=True)
class VertexWeights:
    u: float
    a: float
    b: float
    c: float
    d: float


def vertex_weights(u, ctx):
    """Zero-field weights a,b,c,d at spectral parameter u, normalized so that
    a(u) + b(u) = theta_1(u, q)."""
    eta = ctx.eta
    rho = 2.0 / (ctx.theta(2, 0.0) * ctx.theta_sq(4, 0.0))
    t1 = ctx.theta_sq(1, 2 * eta)
    t4 = ctx.theta_sq(4, 2 * eta)
    um, up = u - eta, u + eta
    return VertexWeights(
        u=u,
        a=rho * t4 * ctx.theta_sq(4, um) * ctx.theta_sq(1, up),
        b=rho * t4 * ctx.theta_sq(1, um) * ctx.theta_sq(4, up),
        c=rho * t1 * ctx.theta_sq(4, um) * ctx.theta_sq(4, up),
        d=rho * t1 * ctx.theta_sq(1, um) * ctx.theta_sq(1, up),
    )


def weight_tensor(u, ctx):
    """Vertex tensor W[mu_in, alpha_bottom, mu_out, alpha_top] (0 = spin +)."""
    vw = vertex_weights(u, ctx)
    W = np.zeros((2, 2, 2, 2))
    for mu in (0, 1):
        for al in (0, 1):
            # both lines conserved
            W[mu, al, mu, al] = vw.a if mu == al else vw.b
            # both lines flipped
            W[mu, al, 1 - mu, 1 - al] = vw.d if mu == al else vw.c
    return W


def transfer_matrix(n, u, ctx, inhomogeneities=None):
    """Row-to-row transfer matrix on the full 2^n space.

    Entry [alpha', alpha] sums over horizontal bond spins; site j is bit j-1
    of the bitmask. Optional per-site shifts u -> u - u_j.
    """
    if n < 2:
        raise DomainError(f"transfer matrix needs n >= 2, got {n}")
    if inhomogeneities is not None and len(inhomogeneities) != n:
        raise DomainError("need one inhomogeneity per site")
    # G[x, m, A', A]: open horizontal indices (first bond x, current bond m)
    # and the vertical indices of the first j sites (site 1 = lowest bit).
    G = np.eye(2).reshape(2, 2, 1, 1)
    for j in range(n):
        shift = inhomogeneities[j] if inhomogeneities is not None else 0.0
        W = weight_tensor(u - shift, ctx)
        G = np.einsum("xmpq,manb->xnbpaq", G, W)
        dim = G.shape[3] * 2
        G = G.reshape(2, 2, dim, dim)
    return np.einsum("xxpq->pq", G)


def hamiltonian_from_transfer(n, ctx, step=1e-5):
    """XYZ Hamiltonian from the logarithmic derivative of the transfer matrix.

    With the weight normalization a(u) + b(u) = h(u) and b(eta) = 0 used here,
    H_N = [ n h'(eta) - h(eta) T(eta)^{-1} T'(eta) ] / b'(eta),
    including the constant shift N (J_x + J_y + J_z)/2. Central differences
    with the given step.
    """
    eta = ctx.eta
    T0 = transfer_matrix(n, eta, ctx)
    Tp = (transfer_matrix(n, eta + step, ctx) - transfer_matrix(n, eta - step, ctx)) / (
        2 * step
    )
    vp, vm = vertex_weights(eta + step, ctx), vertex_weights(eta - step, ctx)
    bprime = (vp.b - vm.b) / (2 * step)
    hprime = (vp.a + vp.b - vm.a - vm.b) / (2 * step)
    a0 = vertex_weights(eta, ctx).a
    return (n * hprime * np.eye(1 << n) - a0 * np.linalg.solve(T0, Tp)) / bprime


# ---------------------------------------------------------------------------
# path basis


@dataclass(frozen=True)
class PathState:
    """A height path: base height ell, down steps at the given positions."""

    ell: int
    positions: tuple
    n: int

    def __post_init__(self):
        if self.ell not in (0, 1, 2):
            raise DomainError(f"base height must be 0, 1 or 2, got {self.ell}")
        xs = self.positions
        if any(not (1 <= x <= self.n) for x in xs) or list(xs) != sorted(set(xs)):
            raise DomainError(f"positions must be strictly increasing in 1..{self.n}")
        if (self.n - 2 * len(xs)) % 3 != 0:
            raise DomainError(
                f"n - 2m = {self.n - 2 * len(xs)} must be a multiple of 3"
            )

    @property
    def m(self):
        return len(self.positions)

    def heights(self):
        """Local heights ell_1 .. ell_{n+1}."""
        hs = [self.ell]
        down = set(self.positions)
        for j in range(1, self.n + 1):
            hs.append(hs[-1] - 1 if j in down else hs[-1] + 1)
        return hs

    def to_json_dict(self):
        return {"ell": self.ell, "positions": list(self.positions), "n": self.n}


def path_states(n):
    """All admissible paths: base height in {0,1,2}, n - 2m = 0 mod 3."""
    states = []
    for m in range(n + 1):
        if (n - 2 * m) % 3 != 0:
            continue
        for ell in range(3):
            for xs in itertools.combinations(range(1, n + 1), m):
                states.append(PathState(ell=ell, positions=xs, n=n))
    return states


def path_state_vector(p, ctx, inhomogeneities=None):
    """Tensor product of local two-component vectors (site 1 = lowest bit)."""
    ctx.require_independent_local_vectors()
    if inhomogeneities is not None and len(inhomogeneities) != p.n:
        raise DomainError("need one inhomogeneity per site")
    hs = p.heights()
    down = set(p.positions)
    vec = np.ones(1)
    for j in range(1, p.n + 1):
        shift = inhomogeneities[j - 1] if inhomogeneities is not None else 0.0
        if j in down:
            lower = hs[j]  # height after the down step
            arg = ctx.t + (2 * lower + 1) * ctx.eta - shift
        else:
            lower = hs[j - 1]
            arg = ctx.s + (2 * lower + 1) * ctx.eta + shift
        comp = np.array([ctx.theta_sq(1, arg), ctx.theta_sq(4, arg)])
        vec = np.outer(comp, vec).ravel()
    return vec


def path_matrix(n, ctx, inhomogeneities=None):
    """(states, matrix) with one column per admissible path."""
    states = path_states(n)
    M = np.column_stack(
        [path_state_vector(p, ctx, inhomogeneities) for p in states]
    )
    return states, M


def path_rank(n, ctx, inhomogeneities=None, threshold=1e-10):
    _, M = path_matrix(n, ctx, inhomogeneities)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > threshold * s[0]))


def path_complement(n, ctx, inhomogeneities=None, threshold=1e-10):
    """Orthonormal basis of the orthogonal complement of the path span."""
    if n % 2 == 0:
        raise DomainError("the path span has a complement only for odd n")
    _, M = path_matrix(n, ctx, inhomogeneities)
    u, s, _ = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > threshold * s[0]))
    comp = u[:, rank:]
    if comp.shape[1] != 2:
        raise InvariantViolation(
            f"path complement at n={n} has dimension {comp.shape[1]}, expected 2"
        )
    return comp


# ---------------------------------------------------------------------------
# supercharge on path coordinates


def hatQ_dagger(n, ctx):
    """Matrix of the particle-inserting supercharge on path coordinates,
    mapping paths of n sites (m down steps) to paths of n-1 sites (m+1).

    Insertion of a down step at x between particles x_{r-1} and x_r carries
    the weight (-1)^x h(w_{ell_{x+1}})^2, with ell_{x+1} the local height of
    the incoming path just after position x.
    """
    if n < 3:
        raise DomainError("hatQ needs n >= 3")
    src = path_states(n)
    dst = path_states(n - 1)
    index = {(p.ell, p.positions): i for i, p in enumerate(dst)}
    Qd = np.zeros((len(dst), len(src)))
    hw = [h(w(ell, ctx), ctx) for ell in range(3)]
    for col, p in enumerate(src):
        xs = p.positions
        m = p.m
        bounds = (0,) + xs + (n + 1,)
        for r in range(1, m + 2):
            for x in range(bounds[r - 1] + 1, bounds[r] - 1):
                new_pos = xs[: r - 1] + (x,) + tuple(xi - 1 for xi in xs[r - 1:])
                height = (p.ell + x - 2 * (r - 1)) % 3
                weight = (-1.0) ** x * hw[height] ** 2
                Qd[index[(p.ell, new_pos)], col] += weight
    return Qd


def hatQ_spin(n, ctx):
    """Spin-space lift of hatQ_{n-1}: maps H_{n-1} -> H_n.

    Built as the adjoint of M_{n-1} hatQ^dag pinv(M_n); the pseudo-inverse
    projects onto the path span, consistent with the convention that the two
    complement states at odd length are annihilated.
    """
    _, M_n = path_matrix(n, ctx)
    _, M_dn = path_matrix(n - 1, ctx)
    Y = M_dn @ hatQ_dagger(n, ctx) @ np.linalg.pinv(M_n)
    return Y.conj().T


def intertwining_residual(n, u, ctx, charge="Q"):
    """|| T_N(u) X_{N-1} + h(u) X_{N-1} T_{N-1}(u) || on the momentum sectors,
    for X one of the supercharges Q, Qtilde (spin space, at zeta(q)) or the
    path-basis charge hatQ lifted to spin space."""
    if n < 3:
        raise DomainError("intertwining check needs n >= 3")
    dom = susy_sector(n - 1)
    cod = susy_sector(n)
    Tn = cod.embedding.conj().T @ transfer_matrix(n, u, ctx) @ cod.embedding
    Tdn = dom.embedding.conj().T @ transfer_matrix(n - 1, u, ctx) @ dom.embedding
    if charge == "hatQ":
        X = cod.embedding.conj().T @ hatQ_spin(n, ctx) @ dom.embedding
    elif charge in ("Q", "Qtilde"):
        pair = build_supercharges(n - 1, zeta_of_nome(ctx.nome))
        X = pair.q_plain.matrix if charge == "Q" else pair.q_tilde.matrix
    else:
        raise DomainError(f"unknown charge {charge!r}")
    return float(np.linalg.norm(Tn @ X + h(u, ctx) * X @ Tdn))


# ---------------------------------------------------------------------------
# Bethe ansatz


@dataclass(frozen=True)
class BetheRoots:
    roots: tuple
    omega: complex
    n: int

    def __post_init__(self):
        if abs(self.omega ** 3 - 1.0) > 1e-9:
            raise DomainError("omega must be a cube root of unity")

    @property
    def m(self):
        return len(self.roots)


def _require_distinct(roots):
    for i, j in itertools.combinations(range(len(roots)), 2):
        if abs(roots[i] - roots[j]) < 1e-9:
            raise DomainError(
                "coincident Bethe roots force a vanishing wave function"
            )


def bethe_residual(br, ctx):
    """LHS - RHS of the Bethe equations for each root.

    The product on the right runs over all k including k = j; the diagonal
    factor h(2 eta)/h(-2 eta) = -1 is part of the convention here, fixed by
    the reduction of the (m+1)-th equation under the u = pi extension.
    """
    _require_distinct(br.roots)
    eta = ctx.eta
    out = []
    for uj in br.roots:
        if abs(h(uj - eta, ctx)) < 1e-12 or abs(h(uj + eta, ctx)) < 1e-12:
            raise PoleError(f"Bethe root {uj} sits at a zero of h(u -+ eta)")
        lhs = (h(uj + eta, ctx) / h(uj - eta, ctx)) ** br.n
        rhs = -br.omega ** 2
        for uk in br.roots:
            rhs *= h(uj - uk + 2 * eta, ctx) / h(uj - uk - 2 * eta, ctx)
        out.append(lhs - rhs)
    return out


def translation_eigenvalue(br, ctx):
    """t_N = omega^{-1} prod_j h(u_j + eta)/h(u_j - eta)."""
    eta = ctx.eta
    val = 1.0 / br.omega
    for uj in br.roots:
        val *= h(uj + eta, ctx) / h(uj - eta, ctx)
    return val


def tq_eigenvalue(u, br, ctx):
    """Transfer-matrix eigenvalue from the T-Q relation."""
    eta = ctx.eta

    def qfun(v):
        out = 1.0 + 0.0j
        for uj in br.roots:
            out *= h(v - uj, ctx)
        return out

    denom = qfun(u)
    scale = max(1.0, max((abs(h(u - uj, ctx)) for uj in br.roots), default=1.0))
    if abs(denom) < 1e-12 * scale:
        raise PoleError(f"T-Q evaluation at a zero of Q(u), u={u}")
    phi = lambda v: h(v, ctx) ** br.n
    return (
        br.omega * phi(u - eta) * qfun(u + 2 * eta)
        + phi(u + eta) / br.omega * qfun(u - 2 * eta)
    ) / denom


def extend_by_pi(br, ctx, tol=1e-8):
    """Append the root pi, lowering the chain length by one.

    Only allowed when t_N = (-1)^{N+1}; the (m+1)-th Bethe equation of the
    shorter chain reduces to exactly this condition.
    """
    t = translation_eigenvalue(br, ctx)
    if abs(t - (-1.0) ** (br.n + 1)) > tol:
        raise DomainError(
            f"extension by pi needs t_N = {(-1) ** (br.n + 1)}, got {t:.6g}"
        )
    return BetheRoots(roots=br.roots + (math.pi,), omega=br.omega, n=br.n - 1)


def _bethe_entire(U, n, omega, ctx):
    """Entire form of the Bethe system on a batch of candidate root tuples.

    U has shape (K, m); the result F has the same shape, with F = 0 exactly
    on solutions (common-denominator form, no poles).
    """
    eta = ctx.eta
    diff = U[:, :, None] - U[:, None, :]
    left = h(U + eta, ctx) ** n * np.prod(h(diff - 2 * eta, ctx), axis=2)
    right = h(U - eta, ctx) ** n * np.prod(h(diff + 2 * eta, ctx), axis=2)
    return left + omega ** 2 * right


def find_bethe_roots(n, m, omega, ctx, grid=13, imag_window=1.2, tol=1e-11):
    """Grid scan plus batched Newton polishing of the Bethe equations, m <= 2.

    Returns a list of BetheRoots with distinct roots and residuals < 1e-9,
    deduplicated modulo pi shifts and root permutations.
    """
    if m not in (1, 2):
        raise DomainError("root searching is supported for m = 1, 2 only")
    omega = complex(omega)

    if m == 2:
        grid = min(grid, 9)
        n_im = 5
    else:
        n_im = 7
    res = np.linspace(0.0, math.pi, grid, endpoint=False)
    ims = np.linspace(-imag_window, imag_window, n_im)
    starts = [complex(x, y) for x in res for y in ims]
    if m == 1:
        U = np.array([[s] for s in starts])
    else:
        U = np.array([[s1, s2] for s1, s2 in itertools.combinations(starts, 2)])

    eps = 1e-7
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
      for _ in range(60):
        F = _bethe_entire(U, n, omega, ctx)
        done = ~np.all(np.isfinite(F), axis=1) | (np.max(np.abs(F), axis=1) < tol)
        if np.all(done):
            break
        J = np.empty(U.shape + (m,), dtype=complex)
        for k in range(m):
            dU = np.zeros_like(U)
            dU[:, k] = eps
            J[:, :, k] = (_bethe_entire(U + dU, n, omega, ctx) - F) / eps
        if m == 1:
            step = (F / np.where(J[:, :, 0] == 0, np.nan, J[:, :, 0]))
        else:
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            det = np.where(np.abs(det) < 1e-30, np.nan, det)
            step = np.empty_like(U)
            step[:, 0] = (J[:, 1, 1] * F[:, 0] - J[:, 0, 1] * F[:, 1]) / det
            step[:, 1] = (J[:, 0, 0] * F[:, 1] - J[:, 1, 0] * F[:, 0]) / det
        # freeze diverging trajectories instead of chasing them
        step = np.where(np.abs(step) > 5.0, np.nan, step)
        active = (np.max(np.abs(F), axis=1) >= tol)[:, None]
        U = U - np.where(active, step, 0.0)

    found = []

    def canonical(us):
        # shift each root's real part into [0, pi) -- h(u+pi) = -h(u) keeps
        # the equations invariant -- and sort for permutation invariance
        vals = []
        for uu in us:
            re = uu.real % math.pi
            if re > math.pi - 1e-6:  # wrap values that land just below pi
                re -= math.pi
            vals.append(complex(re, uu.imag))
        return sorted(vals, key=lambda z: (round(z.real, 6), round(z.imag, 6)))

    def is_new(us):
        cu = canonical(us)
        for other in found:
            co = canonical(other)
            if all(abs(a - b) < 1e-6 for a, b in zip(cu, co)):
                return False
        return True

    for row in U:
        if not np.all(np.isfinite(row)):
            continue
        us = [complex(v) for v in row]
        # keep only the fundamental strip: copies shifted by the imaginary
        # quasi-period of the theta functions assemble to vanishing vectors
        if any(abs(uu.imag) > imag_window + 0.2 for uu in us):
            continue
        if m == 2:
            gap = (us[0] - us[1]).real % math.pi
            if min(gap, math.pi - gap) < 1e-6 and abs(us[0].imag - us[1].imag) < 1e-6:
                continue  # coincident (mod pi) roots: vanishing wave function
        try:
            resid = bethe_residual(BetheRoots(tuple(us), omega, n), ctx)
        except (DomainError, PoleError):
            continue
        if max(abs(r) for r in resid) > 1e-9:
            continue
        if is_new(us):
            found.append(us)
    return [BetheRoots(tuple(us), omega, n) for us in found]


# ---------------------------------------------------------------------------
# Bethe wave functions


def single_particle_g(uj, ell, x, ctx):
    """Baxter's single-particle function g(ell, x) for rapidity u_j."""
    eta = ctx.eta
    eik = h(uj + eta, ctx) / h(uj - eta, ctx)
    return (
        eik ** x
        * h(w(ell + x - 1, ctx) - eta - uj, ctx)
        / (h(w(ell + x - 2, ctx), ctx) * h(w(ell + x - 1, ctx), ctx))
    )


def bethe_amplitudes(roots, ctx):
    """A_pi = sgn(pi) prod_{i<j} h(u_{pi(i)} - u_{pi(j)} + 2 eta)."""
    eta = ctx.eta
    m = len(roots)
    amps = {}
    for perm in itertools.permutations(range(m)):
        sign = 1.0
        for i, j in itertools.combinations(range(m), 2):
            if perm[i] > perm[j]:
                sign = -sign
        val = sign + 0.0j
        for i, j in itertools.combinations(range(m), 2):
            val *= h(roots[perm[i]] - roots[perm[j]] + 2 * eta, ctx)
        amps[perm] = val
    return amps


def bethe_wavefunction(br, ctx, ell, positions):
    """psi(ell; x_1 .. x_m) in Bethe-ansatz form."""
    amps = bethe_amplitudes(br.roots, ctx)
    total = 0.0j
    for perm, A in amps.items():
        term = A
        for slot, x in enumerate(positions):
            term *= single_particle_g(br.roots[perm[slot]], ell - 2 * slot, x, ctx)
        total += term
    return total


def bethe_vector(br, ctx):
    """Transfer eigenvector sum_ell omega^ell sum_x psi(ell; x) |ell; x>.

    The tensor-product orientation used here (site 1 = least significant
    bit) traverses paths in the direction opposite to the one implicit in
    the wave-function ansatz; the Bethe equations are symmetric under
    (u_j, omega) -> (-u_j, omega^{-1}), and assembling the wave function
    with the mapped data yields the eigenvector whose transfer and
    translation eigenvalues are tq_eigenvalue / translation_eigenvalue of
    the original roots.
    """
    flipped = BetheRoots(
        roots=tuple(-r for r in br.roots), omega=1.0 / br.omega, n=br.n
    )
    n = br.n
    vec = np.zeros(1 << n, dtype=complex)
    for p in path_states(n):
        if p.m != br.m:
            continue
        psi = bethe_wavefunction(flipped, ctx, p.ell, p.positions)
        if psi == 0:
            continue
        vec = vec + (flipped.omega ** p.ell) * psi * path_state_vector(p, ctx)
    return vec


def scattering_ratio(u1, u2, ctx):
    """Bare two-particle scattering factor -h(u2-u1+2eta)/h(u1-u2+2eta).

    Equals -1 at coincident rapidities, which forces the Bethe wave function
    to vanish there.
    """
    eta = ctx.eta
    return -h(u2 - u1 + 2 * eta, ctx) / h(u1 - u2 + 2 * eta, ctx)


# ---------------------------------------------------------------------------
# reduction from three to two sites


def theta_triple_product(kind, x, ctx):
    """f_kind(x) = prod_{k=0}^{2} theta_kind(x + 2 pi k / 3, q^2)."""
    return math.prod(
        ctx.theta_sq(kind, x + 2.0 * math.pi * k / 3.0) for k in range(3)
    )


def appendixB_decomposition(ctx):
    """Solve the 3 -> 2 site change of basis for the path-basis supercharge.

    The four translation-invariant three-site states chi_i (the two extreme
    paths summed over base heights, plus the two zero-energy combinations)
    are expanded over the momentum states psi_j through a closed-form matrix
    A built from the triple products f_j. Inverting A against the image
    vector b = (b_1, 0, 0, 0) yields the spin-basis coefficients (c1, c4) of
    hatQ_2^dag = c1 Q_2^dag + c4 Qt_2^dag, whose ratio is f_1(t)/f_4(t).

    A cross-check recomputes everything from the assembled path vectors;
    because theta_1 picks up a sign under x -> x + pi/3 while theta_4 does
    not, the path-vector route reproduces the same magnitudes with the f_1
    entries of A (and hence the ratio) carrying the opposite sign. Both
    ratios are reported.
    """
    ctx.require_independent_local_vectors()
    zeta = zeta_of_nome(ctx.nome)
    s, t = ctx.s, ctx.t
    f1s, f4s = theta_triple_product(1, s, ctx), theta_triple_product(4, s, ctx)
    f1t, f4t = theta_triple_product(1, t, ctx), theta_triple_product(4, t, ctx)

    A = np.array(
        [
            [3 * f1s, -zeta * f4s, -zeta * f1s, 3 * f4s],
            [3 * f1t, -zeta * f4t, -zeta * f1t, 3 * f4t],
            [zeta, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, zeta],
        ]
    )
    if np.linalg.cond(A) > 1e10:
        raise ConfigurationError("singular change of basis: degenerate (s, t)")
    b1 = h((s - t) / 2.0, ctx) * sum(h(w(ell, ctx), ctx) ** 3 for ell in range(3))
    v = np.linalg.solve(A, np.array([b1, 0.0, 0.0, 0.0]))

    # hatQ_2^dag psi_i = v_i phi must decompose over the action tables
    # Q_2^dag -> (0, -zeta, 0, 1) and Qt_2^dag -> (-1, 0, zeta, 0)
    c1, c4 = v[3], -v[0]
    decomp_resid = np.linalg.norm(
        v
        - c1 * np.array([0.0, -zeta, 0.0, 1.0])
        - c4 * np.array([-1.0, 0.0, zeta, 0.0])
    )
    ratio = c1 / c4
    expected = f1t / f4t

    # cross-check against the explicitly assembled path vectors
    psi = np.zeros((8, 4))
    psi[0, 0] = 1.0
    for bits in (1, 2, 4):
        psi[bits, 1] = 1.0
    for bits in (6, 5, 3):
        psi[bits, 2] = 1.0
    psi[7, 3] = 1.0
    phi = np.zeros(4)
    phi[2], phi[1] = 1.0, -1.0

    states3, M3 = path_matrix(3, ctx)
    _, M2 = path_matrix(2, ctx)
    idx3 = {(p.ell, p.positions): i for i, p in enumerate(states3)}
    chi1_coord = np.zeros(len(states3))
    chi2_coord = np.zeros(len(states3))
    for ell in range(3):
        chi1_coord[idx3[(ell, ())]] = 1.0
        chi2_coord[idx3[(ell, (1, 2, 3))]] = 1.0
    chi = np.column_stack(
        [
            M3 @ chi1_coord,
            M3 @ chi2_coord,
            zeta * psi[:, 0] + psi[:, 2],
            zeta * psi[:, 3] + psi[:, 1],
        ]
    )
    A_path, *_ = np.linalg.lstsq(psi, chi, rcond=None)
    A_path = A_path.T
    Qd = hatQ_dagger(3, ctx)
    img1 = M2 @ (Qd @ chi1_coord)
    img2 = M2 @ (Qd @ chi2_coord)
    b1_path = float(np.dot(phi, img1) / np.dot(phi, phi))
    b2_path = float(np.dot(phi, img2) / np.dot(phi, phi))
    off_span = float(np.linalg.norm(img1 - b1_path * phi))
    v_path = np.linalg.solve(A_path, np.array([b1_path, b2_path, 0.0, 0.0]))
    ratio_path = v_path[3] / (-v_path[0])

    return {
        "zeta": zeta,
        "c1": float(c1),
        "c4": float(c4),
        "ratio": float(ratio),
        "expected_ratio": float(expected),
        "ratio_error": float(abs(ratio - expected) / max(1.0, abs(expected))),
        "b1": float(b1),
        "b1_path": b1_path,
        "b2_path": b2_path,
        "image_off_span": off_span,
        "path_convention_ratio": float(ratio_path),
        "decomposition_residual": float(decomp_resid),
        "pass": bool(
            abs(ratio - expected) < 1e-9 * max(1.0, abs(expected))
            and abs(b1 - b1_path) < 1e-9 * max(1.0, abs(b1))
            and abs(ratio_path + expected) < 1e-9 * max(1.0, abs(expected))
            and decomp_resid < 1e-9 * max(1.0, float(np.linalg.norm(v)))
            and off_span < 1e-9
        ),
    }
