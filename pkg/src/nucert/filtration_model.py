"""Section spaces filtered by vanishing order along divisors.

A space V = H^0(bL) carries decreasing filtrations F_i^k = H^0(bL - k D_i).
Three representations are supported:

* profile only: just the dimensions dim F_i^k;
* monomial: a toric section space, where every filtration by an invariant
  divisor is diagonal on the character basis;
* explicit flags: subspaces of Q^q given by spanning vectors.

The last two can produce a basis adapted to two filtrations at once.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy

from .errors import ContractError, InputError, PreconditionError, SearchError
from .multiplicity_solver import NuCertificate, integer_nu_bounds
from .nu_bounds import SurfacePair, nu_lower_bound, section_sum
from .toric_oracle import (
    ToricDivisor,
    ToricPairProvider,
    h0,
    intersection_number,
    is_ample,
    sections,
    vanishing_order,
)


@dataclass(frozen=True)
class MonomialModel:
    bL: ToricDivisor
    divisors: dict
    exponents: tuple

    def cox_exponents(self, u):
        return tuple(p * u[0] + q * u[1] + a for (p, q), a in zip(self.bL.surface.rays, self.bL.coeffs))


@dataclass(frozen=True)
class FlagModel:
    """flags[label][k - 1] spans F^k for k >= 1; F^0 is all of Q^q."""

    q: int
    flags: dict


@dataclass(frozen=True)
class FilteredSectionSpace:
    q: int
    profiles: dict
    model: object = None

    def __post_init__(self):
        profiles = {}
        for label, prof in self.profiles.items():
            prof = list(prof)
            while prof and prof[-1] == 0:
                prof.pop()
            if not prof or prof[0] != self.q:
                raise InputError(f"filtration {label!r}: dim F^0 must equal q = {self.q}")
            if any(b > a for a, b in zip(prof, prof[1:])) or prof[-1] < 0:
                raise InputError(f"filtration {label!r}: profile {prof} is not decreasing")
            profiles[label] = tuple(prof)
        object.__setattr__(self, "profiles", profiles)

    @property
    def labels(self):
        return tuple(self.profiles)

    def dim(self, label, k: int) -> int:
        prof = self.profiles[label]
        return prof[k] if k < len(prof) else 0


def from_profiles(q: int, profiles: dict) -> FilteredSectionSpace:
    return FilteredSectionSpace(q, profiles)


def from_toric(bL: ToricDivisor, divisors: dict) -> FilteredSectionSpace:
    """Monomial model of H^0(bL) filtered along each effective invariant divisor.

    Profiles come from the h0 oracle and are checked against monomial counts.
    """
    exps = tuple(sections(bL))
    q = len(exps)
    if q != h0(bL):
        raise ContractError("monomial count disagrees with h0")
    profiles = {}
    for label, d in divisors.items():
        prof = []
        k = 0
        while True:
            dim = h0(bL - k * d)
            counted = sum(1 for u in exps if vanishing_order(bL, u, d) >= k)
            if dim != counted:
                raise ContractError(f"filtration {label!r} level {k}: h0 = {dim} but {counted} monomials")
            if dim == 0:
                break
            prof.append(dim)
            k += 1
        profiles[label] = prof
    return FilteredSectionSpace(q, profiles, MonomialModel(bL, dict(divisors), exps))


# --- exact linear algebra over Q --------------------------------------------

def _matrix(vectors, q):
    vectors = [sympy.Matrix([sympy.Rational(c) for c in v]) for v in vectors]
    for v in vectors:
        if v.shape != (q, 1):
            raise InputError(f"vector of length {v.shape[0]} in a space of dimension {q}")
    if not vectors:
        return sympy.zeros(q, 0)
    return sympy.Matrix.hstack(*vectors)


def _basis(m):
    if m.shape[1] == 0:
        return m
    cols = m.columnspace()
    return sympy.Matrix.hstack(*cols) if cols else sympy.zeros(m.shape[0], 0)


def _rank(m):
    return 0 if m.shape[1] == 0 else m.rank()


def _sum(a, b):
    return _basis(a.row_join(b))


def _intersect(a, b):
    q = a.shape[0]
    if a.shape[1] == 0 or b.shape[1] == 0:
        return sympy.zeros(q, 0)
    null = a.row_join(-b).nullspace()
    if not null:
        return sympy.zeros(q, 0)
    return _basis(sympy.Matrix.hstack(*[a * n[: a.shape[1], :] for n in null]))


def _contains(space, v):
    return _rank(space.row_join(v)) == _rank(space)


def from_flags(q: int, flags: dict) -> FilteredSectionSpace:
    """Explicit model; ``flags[label]`` lists spanning sets of F^1, F^2, ..."""
    bases = {}
    profiles = {}
    for label, levels in flags.items():
        mats = [sympy.eye(q)] + [_basis(_matrix(vs, q)) for vs in levels]
        for k in range(1, len(mats)):
            if not all(_contains(mats[k - 1], mats[k][:, c]) for c in range(mats[k].shape[1])):
                raise InputError(f"filtration {label!r}: F^{k} is not contained in F^{k - 1}")
        bases[label] = mats
        profiles[label] = [_rank(m) for m in mats]
    return FilteredSectionSpace(q, profiles, FlagModel(q, bases))


def _level(model: FlagModel, label, k):
    mats = model.flags[label]
    return mats[k] if k < len(mats) else sympy.zeros(model.q, 0)


# --- adapted bases ------------------------------------------------------------

@dataclass(frozen=True)
class BasisElement:
    vector: tuple  # Cox exponent vector (monomial model) or coordinates (flag model)
    orders: dict = field(compare=False)


@dataclass(frozen=True)
class AdaptedBasis:
    elements: tuple
    labels: tuple

    def __len__(self):
        return len(self.elements)

    def orders(self, label):
        return [e.orders[label] for e in self.elements]

    def to_json(self):
        return [
            {"vector": [str(Fraction(c)) if not isinstance(c, int) else c for c in e.vector],
             "orders": {str(k): v for k, v in e.orders.items()}}
            for e in self.elements
        ]


def adapted_basis(space: FilteredSectionSpace, labels=None) -> AdaptedBasis:
    """A basis containing a basis of every F_i^k for the (at most two) chosen filtrations."""
    labels = tuple(space.labels if labels is None else labels)
    if not 1 <= len(labels) <= 2 or any(l not in space.profiles for l in labels):
        raise InputError(f"choose one or two of the filtrations {space.labels}")
    model = space.model
    if isinstance(model, MonomialModel):
        elements = tuple(
            BasisElement(model.cox_exponents(u),
                         {l: vanishing_order(model.bL, u, model.divisors[l]) for l in labels})
            for u in model.exponents
        )
        return AdaptedBasis(elements, labels)
    if isinstance(model, FlagModel):
        return _greedy_two_flags(space, model, labels)
    raise InputError("profile-only spaces carry no vectors; supply a monomial or flag model")


def _greedy_two_flags(space, model, labels):
    q = model.q
    j = labels[0]
    l = labels[1] if len(labels) == 2 else None
    depth_j = len(space.profiles[j])
    depth_l = len(space.profiles[l]) if l is not None else 1

    def stratum(a, b):
        fa = _level(model, j, a)
        if l is None:
            return fa if b == 0 else sympy.zeros(q, 0)
        return _intersect(fa, _level(model, l, b))

    chosen = sympy.zeros(q, 0)
    elements = []
    for a in reversed(range(depth_j)):
        for b in reversed(range(depth_l)):
            w = stratum(a, b)
            if w.shape[1] == 0:
                continue
            sub = _sum(stratum(a + 1, b), stratum(a, b + 1))
            need = w.shape[1] - _rank(sub)
            span = sub
            for c in range(w.shape[1]):
                if need == 0:
                    break
                v = w[:, c]
                if not _contains(span, v):
                    span = span.row_join(v)
                    chosen = chosen.row_join(v)
                    orders = {j: a} if l is None else {j: a, l: b}
                    elements.append(BasisElement(tuple(Fraction(int(x.p), int(x.q)) for x in v), orders))
                    need -= 1
    if len(elements) != q or _rank(chosen) != q:
        raise ContractError("greedy selection did not produce a basis")
    return AdaptedBasis(tuple(elements), labels)


def vector_order(space: FilteredSectionSpace, label, vector) -> int:
    """Largest k with the vector in F^k (flag model)."""
    model = space.model
    if not isinstance(model, FlagModel):
        raise InputError("vector orders need a flag model")
    v = _matrix([vector], model.q)
    if all(c == 0 for c in v):
        raise InputError("the zero vector has no order")
    k = 0
    while k + 1 < len(model.flags[label]) and _contains(model.flags[label][k + 1], v):
        k += 1
    return k


def is_adapted(space: FilteredSectionSpace, basis: AdaptedBasis, label) -> bool:
    """#{elements with order >= k} = dim F^k for all k, plus model-level checks."""
    if len(basis) != space.q or label not in basis.labels:
        return False
    orders = basis.orders(label)
    depth = max(len(space.profiles[label]), max(orders, default=0) + 1)
    for k in range(depth + 1):
        if sum(1 for o in orders if o >= k) != space.dim(label, k):
            return False
    model = space.model
    if isinstance(model, FlagModel):
        vecs = _matrix([e.vector for e in basis.elements], model.q)
        if _rank(vecs) != model.q:
            return False
        if any(vector_order(space, label, e.vector) != e.orders[label] for e in basis.elements):
            return False
    elif isinstance(model, MonomialModel):
        if len(set(basis.elements)) != space.q:
            return False
    return True


def profile_sum(space: FilteredSectionSpace, label) -> int:
    """sum_{mu>=1} dim F^mu."""
    return sum(space.profiles[label][1:])


def mu_sum(space: FilteredSectionSpace, basis: AdaptedBasis, label) -> int:
    """sum_k mu(s_k) over an adapted basis; equals :func:`profile_sum`."""
    if not is_adapted(space, basis, label):
        raise ContractError(f"basis is not adapted to filtration {label!r}")
    return sum(basis.orders(label))


def candidate_bases(space: FilteredSectionSpace, vectors):
    """All q-subsets of ``vectors`` that are bases, with their orders. Brute force."""
    vectors = [tuple(Fraction(c) for c in v) for v in vectors]
    elements = [BasisElement(v, {l: vector_order(space, l, v) for l in space.labels}) for v in vectors]
    for subset in combinations(range(len(vectors)), space.q):
        if _det([vectors[i] for i in subset]) != 0:
            yield AdaptedBasis(tuple(elements[i] for i in subset), space.labels)


def _det(rows):
    rows = [list(r) for r in rows]
    n = len(rows)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            factor = rows[r][c] / rows[c][c]
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[c])]
    return det


# --- epsilon and b ----------------------------------------------------------

@dataclass(frozen=True)
class BSearchResult:
    b: int
    epsilon: Fraction
    q: int
    sums: tuple
    thresholds: tuple
    very_ample_assumed: bool = True


def _pair(L, d):
    return SurfacePair(intersection_number(L, L), intersection_number(L, d), intersection_number(d, d))


def find_epsilon_b(L: ToricDivisor, divisors, m, epsilon, b_cap: int = 100,
                   check_precondition: bool = True) -> BSearchResult:
    """Smallest b <= b_cap with sum_{k>=1} h0(bL - kD_i) >= (1+eps) h0(bL) m_i b for all i.

    Very-ampleness of bL is not verified. The precondition nu(L; D_i) >
    (1+eps) m_i is checked through the certified lower bound on nu; pass
    ``check_precondition=False`` to search without it.
    """
    divisors = list(divisors)
    m = list(m)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if len(m) != len(divisors):
        raise InputError("one multiplicity per divisor is required")
    if L is None:
        L = sum((mi * d for mi, d in zip(m, divisors[1:])), m[0] * divisors[0])
    if not is_ample(L):
        raise InputError("L must be ample")
    if b_cap < 1:
        raise InputError("b_cap must be positive")
    if check_precondition:
        failing = []
        for i, (d, mi) in enumerate(zip(divisors, m)):
            bound = nu_lower_bound(_pair(L, d))
            if not bound > (1 + epsilon) * mi:
                failing.append(f"D_{i + 1}: nu_lb = {bound} <= (1+eps) m_i = {(1 + epsilon) * mi}")
        if failing:
            raise PreconditionError("precondition nu(L; D_i) > (1+eps) m_i not certified: " + "; ".join(failing))
    providers = [ToricPairProvider(L, d) for d in divisors]
    for b in range(1, b_cap + 1):
        q = h0(b * L)
        sums = tuple(section_sum(p, b) for p in providers)
        thresholds = tuple((1 + epsilon) * q * mi * b for mi in m)
        if all(s >= t for s, t in zip(sums, thresholds)):
            return BSearchResult(b, epsilon, q, sums, thresholds)
    raise SearchError(f"no admissible b <= {b_cap} for epsilon = {epsilon}")


def epsilon_from_certificate(cert: NuCertificate, form=None) -> Fraction:
    """Half of min_i (nu_lb(L; D_i)/m_i - 1) for L = sum m_j D_j."""
    form = form if form is not None else cert.form
    if form is None:
        raise InputError("certificate carries no intersection form")
    bounds = integer_nu_bounds(form, cert.m)
    slack = min(nu / mi - 1 for nu, mi in zip(bounds, cert.m))
    if slack <= 0:
        raise InputError(f"no epsilon > 0 with nu_lb(L; D_i) > (1+eps) m_i (slack {slack})")
    return slack / 2
