"""Integer multiplicities m_i with nu(sum m_j D_j; D_i) > (r/4) m_i.

The search has two stages. A float solve locates a fixed point x of

    f(t) = (phi(t)/<L_t D_1>, ..., phi(t)/<L_t D_r>),  phi(t) = 1/sum_i 1/<L_t D_i>

on the simplex, and a rational point y = (m_1/m, ..., m_r/m) near x is then
accepted only if the strict inequalities

    <L_y^2>/<L_y D_i> + <L_y^2>^2 <D_i^2> / (6 <L_y D_i>^3) > r y_i

hold in exact arithmetic. The left side is four times the lower bound of
:func:`nucert.nu_bounds.nu_lower_bound` for (L_y, D_i), and that bound is
linear in L, so the inequality transfers to the integer divisor sum m_j D_j.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
import math

import numpy as np
from scipy import optimize

from .errors import CertificationError, InputError, SolverError
from .intersection_core import DivisorWeights, IntersectionForm, pairing, require_valid
from .nu_bounds import SurfacePair, nu_lower_bound

DEFAULT_TOLERANCE = 1e-12
DEFAULT_MAX_ITER = 100_000
DEFAULT_DENOMINATOR_CAP = 10_000
DAMPING = 0.5


def fixed_point_map(form: IntersectionForm, t) -> DivisorWeights:
    """f(t); exact when t has rational coordinates."""
    require_valid(form)
    pv = pairing(form, t)
    if any(p <= 0 for p in pv.lt_dot_di):
        raise InputError("nonpositive pairing <L_t D_i>; form is not ample on the simplex")
    exact = isinstance(pv.lt_squared, Fraction)
    one = Fraction(1) if exact else 1.0
    phi = one / sum(one / p for p in pv.lt_dot_di)
    image = [phi / p for p in pv.lt_dot_di]
    if not exact:
        s = sum(image)
        image = [c / s for c in image]
    return DivisorWeights(tuple(image))


@dataclass(frozen=True)
class FixedPointResult:
    x: DivisorWeights
    phi: float
    residual: float
    iterations: int
    method: str


def _residual(g, x):
    p = g @ x
    phi = 1.0 / np.sum(1.0 / p)
    return float(np.max(np.abs(x * p - phi))), phi, p


def solve_fixed_point(form: IntersectionForm, tol: float = DEFAULT_TOLERANCE,
                      max_iter: int = DEFAULT_MAX_ITER) -> FixedPointResult:
    """Fixed point of f with residual max_i |x_i <L_x D_i> - phi(x)| <= tol.

    Damped iteration x <- (x + f(x))/2 for max_iter/2 steps, then a root
    solve of {x_i (Gx)_i = x_{i+1} (Gx)_{i+1}, sum x = 1} from the best
    iterate. Existence is guaranteed; convergence of either stage is not.
    """
    require_valid(form)
    if not tol > 0:
        raise InputError(f"tolerance must be positive, got {tol!r}")
    if max_iter < 2:
        raise InputError(f"max_iter must be at least 2, got {max_iter!r}")
    g = form.as_array()
    r = form.r
    x = np.full(r, 1.0 / r)
    best_x, best_res = x, math.inf
    half = max_iter // 2
    for it in range(half):
        res, phi, p = _residual(g, x)
        if res < best_res:
            best_x, best_res = x, res
        if res <= tol:
            return _result(x, phi, res, it, "damped")
        fx = phi / p
        x = (1 - DAMPING) * x + DAMPING * fx / fx.sum()

    def system(z):
        w = z * (g @ z)
        return np.append(w[:-1] - w[1:], z.sum() - 1.0)

    attempts = 0
    x = best_x
    while attempts < max_iter - half:
        sol = optimize.root(system, x, method="hybr", options={"xtol": 1e-15})
        attempts += max(sol.nfev, 1)
        z = sol.x
        if np.all(z > 0):
            z = z / z.sum()
            res, phi, _ = _residual(g, z)
            if res < best_res:
                best_x, best_res = z, res
            if res <= tol:
                return _result(z, phi, res, half + attempts, "root")
        if not sol.success or np.allclose(z, x):
            break
        x = z
    raise SolverError(
        f"fixed point not found to tolerance {tol:g}; best residual {best_res:.3e}",
        best_residual=best_res,
    )


def _result(x, phi, res, iterations, method):
    x = x / x.sum()
    return FixedPointResult(DivisorWeights(tuple(float(c) for c in x)), float(phi), res, iterations, method)


def strict_margin(form: IntersectionForm, t, i: int) -> Fraction:
    """Exact lhs - rhs of the inequality for D_i at a rational point t (0-based i)."""
    if not isinstance(t, DivisorWeights):
        t = DivisorWeights(tuple(t))
    if not t.exact:
        raise InputError("strict_margin needs exact rational weights")
    lhs, rhs = _sides(form, t.coords, i)
    return lhs - rhs


def _sides(form, y, i):
    pv = pairing(form, y)
    s, p = pv.lt_squared, pv.lt_dot_di[i]
    lhs = s / p + s * s * form[i, i] / (6 * p ** 3)
    return lhs, form.r * y[i]


def apportion(x, total: int):
    """Largest-remainder rounding of total * x to positive integers summing to total.

    Remainder ties go to the smaller index. Zeros are lifted to 1 by taking
    from the currently largest entry (smallest index on ties).
    """
    r = len(x)
    if total < r:
        raise InputError(f"cannot give {r} positive parts summing to {total}")
    quotas = [total * float(c) for c in x]
    parts = [int(math.floor(q)) for q in quotas]
    leftover = total - sum(parts)
    order = sorted(range(r), key=lambda j: (-(quotas[j] - parts[j]), j))
    for j in order[:leftover]:
        parts[j] += 1
    for j in range(r):
        if parts[j] == 0:
            donor = max(range(r), key=lambda k: (parts[k], -k))
            parts[donor] -= 1
            parts[j] = 1
    return parts


@dataclass(frozen=True)
class NuCertificate:
    """Integer multiplicities and the exact inequalities they satisfy.

    lhs[i] = 4 nu_lb(L_y; D_i) and rhs[i] = r y_i with y = m / denominator.
    """

    m: tuple
    denominator: int
    lhs: tuple
    rhs: tuple
    assumed_ample: bool = True
    residual: float = 0.0
    form: IntersectionForm = field(default=None, compare=False, repr=False)

    @property
    def r(self) -> int:
        return len(self.m)

    @property
    def margins(self) -> tuple:
        return tuple(a - b for a, b in zip(self.lhs, self.rhs))


def certificate_sides(form: IntersectionForm, m, denominator: int):
    """Recompute (lhs, rhs) from scratch; raise CertificationError if invalid."""
    require_valid(form)
    m = tuple(m)
    if len(m) != form.r:
        raise CertificationError(f"{len(m)} multiplicities for a form with r = {form.r}")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in list(m) + [denominator]):
        raise CertificationError("multiplicities and denominator must be integers")
    if any(v < 1 for v in m):
        raise CertificationError(f"multiplicities must be >= 1, got {list(m)}")
    if sum(m) != denominator:
        raise CertificationError(f"sum of multiplicities {sum(m)} != denominator {denominator}")
    if reduce(math.gcd, m, denominator) != 1:
        raise CertificationError("certificate is not gcd-reduced")
    y = tuple(Fraction(v, denominator) for v in m)
    sides = [_sides(form, y, i) for i in range(form.r)]
    lhs = tuple(a for a, _ in sides)
    rhs = tuple(b for _, b in sides)
    bad = [i + 1 for i, (a, b) in enumerate(sides) if not a > b]
    if bad:
        raise CertificationError(f"strict inequality fails for divisor(s) {bad}")
    return lhs, rhs


def verify_certificate(form: IntersectionForm, cert: NuCertificate) -> bool:
    """Re-derive every inequality from (form, m, denominator) and compare with the claims."""
    lhs, rhs = certificate_sides(form, cert.m, cert.denominator)
    if lhs != tuple(cert.lhs) or rhs != tuple(cert.rhs):
        raise CertificationError("stored values differ from values recomputed from the form")
    return True


def rationalize(form: IntersectionForm, fp: FixedPointResult,
                denominator_cap: int = DEFAULT_DENOMINATOR_CAP,
                assumed_ample: bool = True) -> NuCertificate:
    """Smallest denominator m <= cap whose apportioned point passes all exact margins."""
    require_valid(form)
    r = form.r
    if denominator_cap < r:
        raise InputError(f"denominator cap {denominator_cap} is smaller than r = {r}")
    x = fp.x.coords
    for total in range(r, denominator_cap + 1):
        parts = apportion(x, total)
        g = reduce(math.gcd, parts, total)
        if g > 1 and total // g >= r and apportion(x, total // g) == [v // g for v in parts]:
            continue  # already rejected at the smaller denominator
        parts = [v // g for v in parts]
        try:
            lhs, rhs = certificate_sides(form, parts, total // g)
        except CertificationError:
            continue
        return NuCertificate(tuple(parts), total // g, lhs, rhs, assumed_ample, fp.residual, form)
    raise CertificationError(
        f"no admissible rational point with denominator <= {denominator_cap}; raise the cap"
    )


def certify(form: IntersectionForm, tol: float = DEFAULT_TOLERANCE, max_iter: int = DEFAULT_MAX_ITER,
            denominator_cap: int = DEFAULT_DENOMINATOR_CAP, assumed_ample: bool = True) -> NuCertificate:
    fp = solve_fixed_point(form, tol, max_iter)
    return rationalize(form, fp, denominator_cap, assumed_ample)


def integer_nu_bounds(form: IntersectionForm, m) -> tuple:
    """nu_lb(L; D_i) for the integer divisor L = sum_j m_j D_j."""
    l_dot = [sum(mj * form[i, j] for j, mj in enumerate(m)) for i in range(form.r)]
    l_sq = sum(mi * p for mi, p in zip(m, l_dot))
    return tuple(nu_lower_bound(SurfacePair(l_sq, l_dot[i], form[i, i])) for i in range(form.r))
