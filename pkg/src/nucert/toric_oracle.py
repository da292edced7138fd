"""Smooth complete toric surfaces: exact h0, intersection numbers, ampleness.

Global sections of a torus-invariant divisor D = sum a_rho D_rho on a complete
toric surface are spanned by the characters chi^u with u in the polygon
{u : <u, v_rho> >= -a_rho}; no nef hypothesis is needed for this. h0 is
therefore a lattice point count, done here in exact integer arithmetic.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
import math

from .errors import InputError
from .intersection_core import IntersectionForm, require_valid


@dataclass(frozen=True)
class ToricSurface:
    rays: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        rays = tuple((int(x), int(y)) for x, y in self.rays)
        object.__setattr__(self, "rays", rays)
        if len(rays) < 3:
            raise InputError("a complete toric surface needs at least three rays")
        for x, y in rays:
            if math.gcd(x, y) != 1:
                raise InputError(f"ray {(x, y)} is not primitive")
        n = len(rays)
        turn = 0.0
        for i in range(n):
            u, v = rays[i], rays[(i + 1) % n]
            det = u[0] * v[1] - u[1] * v[0]
            if det != 1:
                raise InputError(
                    f"rays {u}, {v} do not form a positively oriented basis (det = {det})"
                )
            turn += math.atan2(det, u[0] * v[0] + u[1] * v[1])
        if round(turn / (2 * math.pi)) != 1:
            raise InputError("rays wind around the origin more than once; fan is not a complete fan")

    def __len__(self):
        return len(self.rays)

    def self_intersection(self, i: int) -> int:
        """D_i^2 from v_{i-1} + v_{i+1} = -(D_i^2) v_i."""
        n = len(self.rays)
        prev, nxt, v = self.rays[(i - 1) % n], self.rays[(i + 1) % n], self.rays[i]
        s = (prev[0] + nxt[0], prev[1] + nxt[1])
        c = s[0] // v[0] if v[0] != 0 else s[1] // v[1]
        assert (c * v[0], c * v[1]) == s
        return -c

    def ray_intersection_matrix(self):
        return _ray_matrix(self.rays)

    def divisor(self, coeffs) -> "ToricDivisor":
        return ToricDivisor(self, tuple(coeffs))

    def ray_divisor(self, i: int) -> "ToricDivisor":
        return self.divisor(1 if j == i else 0 for j in range(len(self.rays)))


@lru_cache(maxsize=None)
def _ray_matrix(rays):
    surface = ToricSurface(rays)
    n = len(rays)
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = surface.self_intersection(i)
        m[i][(i + 1) % n] = 1
        m[(i + 1) % n][i] = 1
    return tuple(tuple(row) for row in m)


@dataclass(frozen=True)
class ToricDivisor:
    surface: ToricSurface
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) != len(self.surface.rays):
            raise InputError(
                f"divisor has {len(coeffs)} coefficients, surface has {len(self.surface.rays)} rays"
            )
        if any(isinstance(a, bool) or int(a) != a for a in coeffs):
            raise InputError(f"ray coefficients must be integers, got {coeffs}")
        object.__setattr__(self, "coeffs", tuple(int(a) for a in coeffs))

    def _check_same(self, other):
        if not isinstance(other, ToricDivisor):
            return NotImplemented
        if other.surface != self.surface:
            raise InputError("divisors live on different surfaces")
        return None

    def __add__(self, other):
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        return ToricDivisor(self.surface, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        return ToricDivisor(self.surface, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, c):
        if isinstance(c, bool) or not isinstance(c, int):
            return NotImplemented
        return ToricDivisor(self.surface, tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self):
        return -1 * self

    @property
    def is_effective_witness(self) -> bool:
        return all(a >= 0 for a in self.coeffs)

    def to_json(self):
        return {"coeffs": list(self.coeffs)}


# --- catalog -----------------------------------------------------------------

def projective_plane() -> ToricSurface:
    return ToricSurface(((1, 0), (0, 1), (-1, -1)), name="P2")


def p1xp1() -> ToricSurface:
    return ToricSurface(((1, 0), (0, 1), (-1, 0), (0, -1)), name="P1xP1")


def hirzebruch(e: int) -> ToricSurface:
    """F_e with rays (1,0), (0,1), (-1,e), (0,-1); D_1 is the section of square -e."""
    if isinstance(e, bool) or not isinstance(e, int) or e < 0:
        raise InputError(f"Hirzebruch index must be a nonnegative integer, got {e!r}")
    return ToricSurface(((1, 0), (0, 1), (-1, e), (0, -1)), name=f"F{e}")


def degree_class(surface: ToricSurface, d: int) -> ToricDivisor:
    """d times a line on P2, as d D_0."""
    if surface != projective_plane():
        raise InputError("'degree' classes are only defined on P2")
    return surface.divisor((d, 0, 0))


def bidegree_class(surface: ToricSurface, a: int, b: int) -> ToricDivisor:
    """O(a, b): on P1xP1, a D_0 + b D_1; on F_e, a S + b F with S = D_1, F = D_0."""
    if surface == p1xp1():
        return surface.divisor((a, b, 0, 0))
    rays = surface.rays
    if len(rays) == 4 and rays[0] == (1, 0) and rays[1] == (0, 1) and rays[3] == (0, -1):
        return surface.divisor((b, a, 0, 0))
    raise InputError("'O' classes are only defined on P1xP1 and Hirzebruch surfaces")


# --- intersection theory -----------------------------------------------------

def intersection_number(d: ToricDivisor, e: ToricDivisor) -> int:
    if d.surface != e.surface:
        raise InputError("divisors live on different surfaces")
    m = d.surface.ray_intersection_matrix()
    return sum(a * m[i][j] * b for i, a in enumerate(d.coeffs) if a for j, b in enumerate(e.coeffs) if b)


def is_ample(d: ToricDivisor) -> bool:
    """Toric criterion: D . D_rho > 0 for every invariant curve."""
    s = d.surface
    return all(intersection_number(d, s.ray_divisor(i)) > 0 for i in range(len(s)))


def is_nef(d: ToricDivisor) -> bool:
    s = d.surface
    return all(intersection_number(d, s.ray_divisor(i)) >= 0 for i in range(len(s)))


def intersection_form_of(divisors) -> IntersectionForm:
    divisors = list(divisors)
    if not divisors:
        raise InputError("no divisors given")
    surface = divisors[0].surface
    for i, d in enumerate(divisors):
        if d.surface != surface:
            raise InputError("divisors live on different surfaces")
        if not is_ample(d):
            raise InputError(f"divisor {i + 1} with coefficients {d.coeffs} is not ample")
    form = IntersectionForm(
        tuple(tuple(intersection_number(a, b) for b in divisors) for a in divisors)
    )
    require_valid(form)
    return form


# --- section polygons and lattice point counting ------------------------------

@dataclass(frozen=True)
class DivisorPolygon:
    """{u : p x + q y >= -a for each (p, q, a)}, bounded for a complete fan."""

    halfplanes: tuple
    vertices: tuple

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def count(self) -> int:
        return _count_points(self.halfplanes, self.vertices)

    def points(self):
        return _enumerate_points(self.halfplanes, self.vertices)


def divisor_polygon(d: ToricDivisor) -> DivisorPolygon:
    halfplanes = tuple((p, q, a) for (p, q), a in zip(d.surface.rays, d.coeffs))
    return DivisorPolygon(halfplanes, _vertices(halfplanes))


def _crossings(halfplanes):
    for (p1, q1, a1), (p2, q2, a2) in combinations(halfplanes, 2):
        det = p1 * q2 - q1 * p2
        if det == 0:
            continue
        yield (Fraction(-a1 * q2 + a2 * q1, det), Fraction(-p1 * a2 + p2 * a1, det))


def _vertices(halfplanes):
    pts = set()
    for x, y in _crossings(halfplanes):
        if all(p * x + q * y >= -a for p, q, a in halfplanes):
            pts.add((x, y))
    return tuple(sorted(pts))


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """sum_{i=0}^{n-1} floor((a i + b) / m) for m > 0, in O(log) steps."""
    if n <= 0:
        return 0
    total = 0
    if a < 0 or a >= m:
        a2 = a % m
        total += n * (n - 1) // 2 * ((a - a2) // m)
        a = a2
    if b < 0 or b >= m:
        b2 = b % m
        total += n * ((b - b2) // m)
        b = b2
    while True:
        if a >= m:
            total += n * (n - 1) // 2 * (a // m)
            a %= m
        if b >= m:
            total += n * (b // m)
            b %= m
        y_max = a * n + b
        if y_max < m:
            return total
        n, b, m, a = y_max // m, y_max % m, a, m


def _count_points(halfplanes, vertices) -> int:
    if not vertices:
        return 0
    ylo = min(y for _, y in vertices)
    yhi = max(y for _, y in vertices)
    lower = [(p, q, a) for p, q, a in halfplanes if p > 0]
    upper = [(p, q, a) for p, q, a in halfplanes if p < 0]
    breaks = sorted({y for _, y in _crossings(halfplanes) if ylo <= y <= yhi} | {ylo, yhi})
    total = 0
    for s in range(len(breaks)):
        c0 = breaks[s]
        last = s == len(breaks) - 1
        c1 = c0 if last else breaks[s + 1]
        y_a = math.ceil(c0)
        y_b = math.floor(c1) if last else math.ceil(c1) - 1
        n = y_b - y_a + 1
        if n <= 0:
            continue
        mid = (c0 + c1) / 2
        # x <= (a + q y)/(-p) for p < 0; x >= -(a + q y)/p for p > 0
        pu, qu, au = min(upper, key=lambda h: Fraction(h[2] + h[1] * mid, -h[0]))
        pl, ql, al = min(lower, key=lambda h: Fraction(h[2] + h[1] * mid, h[0]))
        total += floor_sum(n, -pu, qu, au + qu * y_a) + floor_sum(n, pl, ql, al + ql * y_a) + n
    return total


def _row_bounds(halfplanes, y):
    lo, hi = None, None
    for p, q, a in halfplanes:
        if p > 0:
            b = -((a + q * y) // p)
            lo = b if lo is None else max(lo, b)
        elif p < 0:
            b = (a + q * y) // (-p)
            hi = b if hi is None else min(hi, b)
        elif q * y < -a:
            return 1, 0
    return lo, hi


def _enumerate_points(halfplanes, vertices):
    if not vertices:
        return []
    ylo = math.ceil(min(y for _, y in vertices))
    yhi = math.floor(max(y for _, y in vertices))
    pts = []
    for y in range(ylo, yhi + 1):
        lo, hi = _row_bounds(halfplanes, y)
        pts.extend((x, y) for x in range(lo, hi + 1))
    return pts


def brute_force_count(d: ToricDivisor, radius: int) -> int:
    """Count polygon points inside the box |x|, |y| <= radius. Test oracle."""
    return sum(
        1
        for x in range(-radius, radius + 1)
        for y in range(-radius, radius + 1)
        if all(p * x + q * y >= -a for (p, q), a in zip(d.surface.rays, d.coeffs))
    )


def _canonical_coeffs(rays, coeffs):
    # shift by div(chi^m) so the first two coefficients vanish; h0 is invariant
    (p0, q0), (p1, q1) = rays[0], rays[1]
    a0, a1 = coeffs[0], coeffs[1]
    # solve <m, v0> = -a0, <m, v1> = -a1 with det(v0, v1) = 1
    mx = -a0 * q1 + a1 * q0
    my = -p0 * a1 + p1 * a0
    return tuple(a + p * mx + q * my for (p, q), a in zip(rays, coeffs))


@lru_cache(maxsize=1 << 18)
def _h0_cached(rays, coeffs):
    halfplanes = tuple((p, q, a) for (p, q), a in zip(rays, coeffs))
    return _count_points(halfplanes, _vertices(halfplanes))


def h0(d: ToricDivisor) -> int:
    """Exact dimension of the space of global sections of O(D)."""
    rays = d.surface.rays
    return _h0_cached(rays, _canonical_coeffs(rays, d.coeffs))


def sections(d: ToricDivisor):
    """Exponents u of the monomial basis chi^u of H^0(O(D))."""
    return divisor_polygon(d).points()


def vanishing_order(d: ToricDivisor, u, component: ToricDivisor) -> int:
    """Largest mu with div(chi^u) + D - mu * component effective.

    ``component`` must be a nonzero effective invariant divisor.
    """
    orders = [p * u[0] + q * u[1] + a for (p, q), a in zip(d.surface.rays, d.coeffs)]
    if any(o < 0 for o in orders):
        raise InputError(f"{u} is not a section of {d.coeffs}")
    if not component.is_effective_witness or not any(component.coeffs):
        raise InputError("vanishing orders are taken along nonzero effective invariant divisors")
    return min(o // c for o, c in zip(orders, component.coeffs) if c > 0)


def curve_h0(l_deg: int) -> int:
    """h0(P1, O(d))."""
    return l_deg + 1 if l_deg >= 0 else 0


# --- h0 providers for truncated nu --------------------------------------------

@dataclass(frozen=True)
class ToricPairProvider:
    """h0(nL - kE) on a toric surface, for ample L and nonzero effective E."""

    L: ToricDivisor
    E: ToricDivisor

    def __post_init__(self):
        if not is_ample(self.L):
            raise InputError("L must be ample")
        if not self.E.is_effective_witness or not any(self.E.coeffs):
            raise InputError("E must be a nonzero effective divisor")

    def h0(self, n: int, k: int) -> int:
        return h0(n * self.L - k * self.E)

    def vanishing_bound(self, n: int) -> int:
        # nL - kE effective forces L.(nL - kE) >= 0
        return intersection_number(self.L, self.L) * n // intersection_number(self.L, self.E)


@dataclass(frozen=True)
class CurveProvider:
    """h0(P1, O(n a - k b))."""

    l_deg: int
    e_deg: int

    def __post_init__(self):
        if self.l_deg < 1 or self.e_deg < 1:
            raise InputError("curve degrees must be positive")

    def h0(self, n: int, k: int) -> int:
        return curve_h0(n * self.l_deg - k * self.e_deg)

    def vanishing_bound(self, n: int) -> int:
        return n * self.l_deg // self.e_deg


# --- proper intersection -----------------------------------------------------

@dataclass(frozen=True)
class DivisorSupport:
    """Support of an effective divisor.

    ``invariant`` holds the indices of invariant prime components; ``general``
    holds tags of declared general members of base-point-free classes, which
    are modeled symbolically and never share components with anything.
    """

    invariant: frozenset = frozenset()
    general: tuple = ()

    @property
    def has_general(self) -> bool:
        return bool(self.general)


def support_of(d: ToricDivisor) -> DivisorSupport:
    if not d.is_effective_witness or not any(d.coeffs):
        raise InputError(f"{d.coeffs} is not a nonzero effective representative")
    return DivisorSupport(frozenset(i for i, a in enumerate(d.coeffs) if a > 0))


def general_member(d: ToricDivisor, tag: str = "") -> DivisorSupport:
    if not is_nef(d) or not any(d.coeffs):
        raise InputError(f"class {d.coeffs} is not base-point-free; no general member can be declared")
    return DivisorSupport(general=(tag or f"general{list(d.coeffs)}",))


@dataclass(frozen=True)
class ProperIntersectionReport:
    failures: tuple
    assumptions: tuple

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {
            "proper": self.ok,
            "failures": [
                {"pair": [i + 1, j + 1], "shared_components": sorted(c)} for i, j, c in self.failures
            ],
            "assumptions": list(self.assumptions),
        }


def proper_intersection_check(supports) -> ProperIntersectionReport:
    """Pairwise intersections finite and triple intersections empty.

    Invariant supports are decided combinatorially: two supports meet in a
    finite set iff they share no prime component, and three distinct
    invariant prime divisors never share a point on a surface (no cone of a
    2-dimensional fan has three rays). Anything involving general members is
    accepted and recorded as an assumption.
    """
    supports = list(supports)
    failures = []
    assumptions = []
    for (i, a), (j, b) in combinations(enumerate(supports), 2):
        shared = a.invariant & b.invariant
        if shared:
            failures.append((i, j, frozenset(shared)))
        elif a.has_general or b.has_general:
            assumptions.append(f"pair ({i + 1},{j + 1}): general member assumed to share no component")
    if not failures:
        for (i, a), (j, b), (k, c) in combinations(enumerate(supports), 3):
            if a.has_general or b.has_general or c.has_general:
                assumptions.append(
                    f"triple ({i + 1},{j + 1},{k + 1}): empty intersection assumed by general position"
                )
    return ProperIntersectionReport(tuple(failures), tuple(assumptions))
