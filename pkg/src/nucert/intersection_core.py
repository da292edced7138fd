"""Intersection pairing on a surface, restricted to the span of D_1..D_r.

Everything here works in two arithmetic modes: exact (``Fraction``/``int``
coordinates) for certification, and float for locating fixed points.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from .errors import InputError

NUMERIC_SUM_TOL = 1e-12


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric integer matrix of intersection numbers <D_i D_j>.

    Construction only checks shape and integrality; the geometric necessary
    conditions are reported by :func:`validate_form`.
    """

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if not rows:
            raise InputError("intersection form must have at least one divisor")
        r = len(rows)
        for i, row in enumerate(rows):
            if len(row) != r:
                raise InputError(f"intersection form is not square: row {i} has {len(row)} entries, expected {r}")
            for j, v in enumerate(row):
                if isinstance(v, bool) or not _is_integer(v):
                    raise InputError(f"entry ({i},{j}) = {v!r} is not an integer")
        object.__setattr__(self, "entries", tuple(tuple(int(v) for v in row) for row in rows))

    @property
    def r(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def scaled(self, c: int) -> "IntersectionForm":
        return IntersectionForm(tuple(tuple(c * v for v in row) for row in self.entries))

    def to_json(self):
        return [list(row) for row in self.entries]


def _is_integer(v) -> bool:
    if isinstance(v, Integral):
        return True
    if isinstance(v, Rational):
        return v.denominator == 1
    return False


@dataclass(frozen=True)
class DivisorWeights:
    """A point t of the simplex, standing for L_t = sum_j t_j D_j."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise InputError("empty weight vector")
        exact = all(isinstance(c, (Integral, Rational)) and not isinstance(c, bool) for c in coords)
        if exact:
            coords = tuple(Fraction(c) for c in coords)
            if any(c < 0 for c in coords):
                raise InputError(f"negative weight in {coords}")
            if sum(coords) != 1:
                raise InputError(f"weights sum to {sum(coords)}, not 1")
        else:
            coords = tuple(float(c) for c in coords)
            if any(c < 0 for c in coords):
                raise InputError(f"negative weight in {coords}")
            if abs(sum(coords) - 1.0) > NUMERIC_SUM_TOL:
                raise InputError(f"weights sum to {sum(coords)!r}, not 1")
        object.__setattr__(self, "coords", coords)

    @property
    def exact(self) -> bool:
        return isinstance(self.coords[0], Fraction)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


@dataclass(frozen=True)
class PairingValues:
    lt_dot_di: tuple
    lt_squared: object


def pairing(form: IntersectionForm, t) -> PairingValues:
    """Return (<L_t D_i>)_i and <L_t^2> by bilinear extension of ``form``."""
    if not isinstance(t, DivisorWeights):
        t = DivisorWeights(tuple(t))
    if len(t) != form.r:
        raise InputError(f"weight vector has {len(t)} coordinates, form has r = {form.r}")
    coords = t.coords
    lt_dot_di = tuple(sum(c * e for c, e in zip(coords, row)) for row in form.entries)
    lt_squared = sum(c * p for c, p in zip(coords, lt_dot_di))
    return PairingValues(lt_dot_di, lt_squared)


@dataclass(frozen=True)
class Violation:
    kind: str  # "asymmetry", "nonpositive", "hodge"
    i: int
    j: int
    detail: str

    def to_json(self):
        return {"kind": self.kind, "i": self.i, "j": self.j, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"valid": self.ok, "violations": [v.to_json() for v in self.violations]}


def validate_form(form: IntersectionForm) -> ValidationReport:
    """Check symmetry, positivity and the pairwise Hodge inequality.

    These are necessary conditions for D_1..D_r to be ample and effective; a
    passing matrix is not thereby shown to come from ample divisors.
    Indices in the report are 1-based.
    """
    violations = []
    r = form.r
    for i in range(r):
        for j in range(r):
            a = form[i, j]
            if j > i and a != form[j, i]:
                violations.append(Violation("asymmetry", i + 1, j + 1, f"{a} != {form[j, i]}"))
            if a < 1:
                violations.append(Violation("nonpositive", i + 1, j + 1, f"entry {a} < 1"))
    for i in range(r):
        for j in range(i + 1, r):
            a = form[i, j]
            if a * a < form[i, i] * form[j, j]:
                violations.append(
                    Violation("hodge", i + 1, j + 1, f"{a}^2 < {form[i, i]}*{form[j, j]}")
                )
    return ValidationReport(tuple(violations))


def require_valid(form: IntersectionForm) -> None:
    report = validate_form(form)
    if not report.ok:
        detail = "; ".join(f"{v.kind} at ({v.i},{v.j}): {v.detail}" for v in report.violations)
        raise InputError(f"invalid intersection form: {detail}")
