"""Closed-form bounds on section counts and on the invariant nu(L; E).

nu(L; E) is the liminf of S_n / (h0(nL) n) with S_n = sum_{k>=1} h0(nL - kE).
All arithmetic on this path is exact.
"""
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Protocol

from .errors import InputError, PreconditionError


def _positive_int(name, v):
    if isinstance(v, bool) or not isinstance(v, Integral) or v < 1:
        raise InputError(f"{name} must be a positive integer, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class SurfacePair:
    """Intersection data of an ample L and an ample effective E on a surface."""

    l_sq: int
    l_dot_e: int
    e_sq: int

    def __post_init__(self):
        for name in ("l_sq", "l_dot_e", "e_sq"):
            object.__setattr__(self, name, _positive_int(name, getattr(self, name)))
        if self.l_dot_e ** 2 < self.l_sq * self.e_sq:
            raise InputError(
                f"Hodge index violated: <LE>^2 = {self.l_dot_e ** 2} < <L^2><E^2> = {self.l_sq * self.e_sq}"
            )

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.l_dot_e, self.e_sq)

    @property
    def beta(self) -> Fraction:
        return Fraction(self.l_sq, self.l_dot_e)


def morse_lower_bound(p: SurfacePair, n: int, k: int) -> Fraction:
    """Quadratic part <L^2> n^2/2 - <LM> n k + <M^2> k^2/2 of the h0 lower bound.

    The bound on h0(nL - kM) only holds up to an unspecified O(n) term; the
    caller supplies that slack. Requires 1 <= k <= alpha n.
    """
    n = _positive_int("n", n)
    k = _positive_int("k", k)
    if k * p.e_sq > p.l_dot_e * n:
        raise PreconditionError(f"k = {k} exceeds alpha*n = {p.alpha * n}")
    return Fraction(p.l_sq * n * n, 2) - p.l_dot_e * n * k + Fraction(p.e_sq * k * k, 2)


def nu_lower_bound(p: SurfacePair) -> Fraction:
    """beta/4 + beta^2/(24 alpha), i.e. <L^2>/(4<LE>) + <L^2>^2 <E^2>/(24 <LE>^3)."""
    beta, alpha = p.beta, p.alpha
    return beta / 4 + beta * beta / (24 * alpha)


def curve_nu(l_deg: int, e_deg: int) -> Fraction:
    """Exact nu(L; E) on a curve: deg L / (2 deg E)."""
    return Fraction(_positive_int("l_deg", l_deg), 2 * _positive_int("e_deg", e_deg))


class H0Provider(Protocol):
    """Exact h0(nL - kE) for a fixed pair (L, E)."""

    def h0(self, n: int, k: int) -> int: ...

    def vanishing_bound(self, n: int) -> int:
        """An integer K with h0(nL - kE) = 0 for every k > K."""
        ...


def section_sum(provider: H0Provider, n: int) -> int:
    """S_n = sum_{k>=1} h0(nL - kE)."""
    n = _positive_int("n", n)
    return sum(provider.h0(n, k) for k in range(1, provider.vanishing_bound(n) + 1))


def truncated_nu(provider: H0Provider, n: int) -> Fraction:
    """S_n / (h0(nL) n) at a single finite n."""
    n = _positive_int("n", n)
    q = provider.h0(n, 0)
    if q == 0:
        raise InputError(f"h0(nL) = 0 at n = {n}; cannot normalize")
    return Fraction(section_sum(provider, n), q * n)


@dataclass(frozen=True)
class NuWindow:
    values: dict
    minimum: Fraction
    argmin: int


def windowed_nu(provider: H0Provider, n0: int, n: int) -> NuWindow:
    """Truncated values over [n0, n] and their running minimum.

    The minimum is reported as evidence for the liminf; no convergence claim.
    """
    n0 = _positive_int("n0", n0)
    n = _positive_int("n", n)
    if n0 > n:
        raise InputError(f"empty window [{n0}, {n}]")
    values = {j: truncated_nu(provider, j) for j in range(n0, n + 1)}
    argmin = min(values, key=lambda j: (values[j], j))
    return NuWindow(values, values[argmin], argmin)
