"""Jacobi theta functions and derived scalar quantities.

All theta functions follow the Whittaker-Watson conventions and are evaluated
by the plain q-series, truncated once the next term drops below a tolerance.
The crossing parameter eta = pi/3 is the root-of-unity point where the lattice
supersymmetry lives; everything downstream (vertex weights, path-basis local
vectors, fermion couplings) is built from the quantities defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, RangeError

ETA_SUSY = math.pi / 3

_MAX_TERMS = 64


def theta(kind, z, nome, trunc_tol=1e-16):
    """Jacobi theta function theta_kind(z, q) via the truncated q-series.

    kind is 1..4; z may be real or complex (scalar or array). Real input
    returns real output. Raises DomainError unless 0 <= nome < 1.
    """
    if kind not in (1, 2, 3, 4):
        raise DomainError(f"theta kind must be 1..4, got {kind}")
    if not (0.0 <= nome < 1.0):
        raise DomainError(f"nome must lie in [0, 1), got {nome}")

    z = np.asarray(z)
    is_complex = np.iscomplexobj(z)
    total = np.zeros(z.shape, dtype=complex if is_complex else float)

    for n in range(_MAX_TERMS):
        if kind == 1:
            term = 2.0 * (-1.0) ** n * nome ** ((n + 0.5) ** 2) * np.sin((2 * n + 1) * z)
        elif kind == 2:
            term = 2.0 * nome ** ((n + 0.5) ** 2) * np.cos((2 * n + 1) * z)
        elif kind == 3:
            term = 1.0 if n == 0 else 2.0 * nome ** (n ** 2) * np.cos(2 * n * z)
        else:
            term = 1.0 if n == 0 else 2.0 * (-1.0) ** n * nome ** (n ** 2) * np.cos(2 * n * z)
        total = total + term
        # superexponential decay in n; bound the next term's magnitude
        if kind in (1, 2):
            bound = 2.0 * nome ** ((n + 1.5) ** 2)
        else:
            bound = 2.0 * nome ** ((n + 1) ** 2)
        if is_complex:
            bound *= math.exp((2 * n + 3) * float(np.max(np.abs(z.imag)))) if z.size else 1.0
        if bound < trunc_tol:
            break

    if total.ndim == 0:
        return total[()]
    return total


@dataclass(frozen=True)
class ThetaContext:
    """Elliptic nome, crossing parameter and the free path-basis parameters.

    The pair (s, t) enters the local vectors of Baxter's path basis; it is
    only constrained by linear independence of those vectors, which is
    checked at runtime (see `local_vector_determinants`).
    """

    nome: float
    eta: float = ETA_SUSY
    s: float = 0.3
    t: float = -0.7
    trunc_tol: float = 1e-16

    def __post_init__(self):
        if not (0.0 <= self.nome < 1.0):
            raise DomainError(f"nome must lie in [0, 1), got {self.nome}")

    def theta(self, kind, z):
        return theta(kind, z, self.nome, self.trunc_tol)

    def theta_sq(self, kind, z):
        """Theta function at nome**2, as used by vertex weights and local vectors."""
        return theta(kind, z, self.nome ** 2, self.trunc_tol)

    def local_vector_determinants(self):
        """2x2 determinants of the up/down local vectors for ell = 0, 1, 2."""
        dets = []
        for ell in range(3):
            arg_up = self.s + (2 * ell + 1) * self.eta
            arg_dn = self.t + (2 * ell + 1) * self.eta
            dets.append(
                self.theta_sq(1, arg_up) * self.theta_sq(4, arg_dn)
                - self.theta_sq(4, arg_up) * self.theta_sq(1, arg_dn)
            )
        return dets

    def require_independent_local_vectors(self, rel_tol=1e-10):
        scale = max(1.0, abs(self.theta_sq(4, self.s)), abs(self.theta_sq(4, self.t)))
        if min(abs(d) for d in self.local_vector_determinants()) < rel_tol * scale ** 2:
            raise ConfigurationError(
                f"local path-basis vectors are (nearly) linearly dependent for "
                f"s={self.s}, t={self.t}, nome={self.nome}"
            )


def h(u, ctx):
    """h(u) = theta_1(u, q); odd and antiperiodic, h(u + pi) = -h(u)."""
    return ctx.theta(1, u)


def w(ell, ctx):
    """Affine height function w_ell = (s+t)/2 - pi/2 + 2*ell*eta."""
    return (ctx.s + ctx.t) / 2.0 - math.pi / 2.0 + 2.0 * ell * ctx.eta


def zeta_of_nome(nome, trunc_tol=1e-16):
    """Coupling zeta = (theta_1(2pi/3, q^2) / theta_4(2pi/3, q^2))^2."""
    if not (0.0 <= nome < 1.0):
        raise DomainError(f"nome must lie in [0, 1), got {nome}")
    z = 2.0 * math.pi / 3.0
    q2 = nome ** 2
    return (theta(1, z, q2, trunc_tol) / theta(4, z, q2, trunc_tol)) ** 2


def nome_of_zeta(zeta, nome_max=0.99, tol=1e-12):
    """Invert zeta_of_nome by bisection on the monotone map [0, nome_max]."""
    if zeta < 0:
        raise RangeError(f"zeta must be nonnegative, got {zeta}")
    if zeta == 0.0:
        return 0.0
    # zeta(q) increases from 0 and saturates at 1 as q -> 1; values beyond the
    # cap (minus the bisection tolerance) are not representable by a real nome
    if zeta > zeta_of_nome(nome_max) + tol:
        raise RangeError(
            f"zeta={zeta} not reachable with nome <= {nome_max} "
            f"(max zeta {zeta_of_nome(nome_max):.6g})"
        )
    lo, hi = 0.0, nome_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if zeta_of_nome(mid) < zeta:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if abs(zeta_of_nome(mid) - zeta) > tol:
        raise RangeError(f"bisection for zeta={zeta} did not reach tolerance {tol}")
    return mid
