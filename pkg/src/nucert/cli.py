"""Batch front end: JSON problem in, JSON certificate or report out.

Exit codes: 0 success, 1 invalid input, 2 solver/search failure,
3 certification failure.
"""
import argparse
import json
import sys

from . import __version__
from .errors import CertificationError, InputError, NucertError
from .filtration_model import (
    adapted_basis,
    epsilon_from_certificate,
    find_epsilon_b,
    from_toric,
    mu_sum,
    profile_sum,
)
from .intersection_core import IntersectionForm, validate_form
from .multiplicity_solver import (
    DEFAULT_DENOMINATOR_CAP,
    DEFAULT_MAX_ITER,
    DEFAULT_TOLERANCE,
    NuCertificate,
    certificate_sides,
    certify,
    integer_nu_bounds,
)
from .nu_bounds import SurfacePair, curve_nu, nu_lower_bound, truncated_nu, windowed_nu
from .rational import format_fraction, parse_fraction
from .toric_oracle import (
    CurveProvider,
    ToricPairProvider,
    ToricSurface,
    bidegree_class,
    degree_class,
    general_member,
    hirzebruch,
    intersection_form_of,
    intersection_number,
    p1xp1,
    projective_plane,
    proper_intersection_check,
    support_of,
)

SCHEMA = "nucert.certificate/1"
COMMANDS = ("nu-bound", "oracle-nu", "solve-multiplicities", "verify-certificate",
            "proper-check", "adapted-basis", "find-b")

ABSTRACT_ASSUMPTION = "D_i ample and effective: asserted by the user, not verifiable from the matrix"
TORIC_ASSUMPTION = "D_i ample: verified by the toric criterion D.D_rho > 0"


class ProperFailure(InputError):
    def __init__(self, report):
        super().__init__("divisors do not intersect properly")
        self.report = report


class InvalidForm(InputError):
    def __init__(self, report):
        super().__init__("intersection form fails validation")
        self.report = report


# --- config parsing ----------------------------------------------------------

def parse_surface(config) -> ToricSurface:
    if "rays" in config:
        return ToricSurface(tuple(tuple(v) for v in config["rays"]), name="custom")
    spec = config["surface"]
    if spec == "P2":
        return projective_plane()
    if spec == "P1xP1":
        return p1xp1()
    if isinstance(spec, dict) and "hirzebruch" in spec:
        return hirzebruch(spec["hirzebruch"])
    if isinstance(spec, dict) and "rays" in spec:
        return ToricSurface(tuple(tuple(v) for v in spec["rays"]), name="custom")
    raise InputError(f"unknown surface {spec!r}")


def parse_divisor(surface, spec):
    if not isinstance(spec, dict):
        raise InputError(f"divisor must be an object, got {spec!r}")
    if "coeffs" in spec:
        return surface.divisor(spec["coeffs"])
    if "degree" in spec:
        return degree_class(surface, spec["degree"])
    if "O" in spec:
        a, b = spec["O"]
        return bidegree_class(surface, a, b)
    raise InputError(f"divisor {spec!r} needs one of 'coeffs', 'degree', 'O'")


def input_kind(config) -> str:
    if not isinstance(config, dict):
        raise InputError("configuration must be a JSON object")
    kinds = [k for k, present in (("abstract", "form" in config),
                                  ("toric", "surface" in config or "rays" in config),
                                  ("curve", "curve" in config)) if present]
    if len(kinds) != 1:
        raise InputError(f"exactly one input kind (form | surface | curve) must be present, found {kinds}")
    return kinds[0]


def load_problem(config):
    """Return (kind, form, surface, divisors); form is validated."""
    kind = input_kind(config)
    if kind == "abstract":
        form = IntersectionForm(tuple(tuple(row) for row in config["form"]))
        report = validate_form(form)
        if not report.ok:
            raise InvalidForm(report)
        return kind, form, None, None
    if kind == "curve":
        return kind, None, None, None
    surface = parse_surface(config)
    divisors = [parse_divisor(surface, d) for d in config.get("divisors", [])]
    form = intersection_form_of(divisors) if divisors else None
    return kind, form, surface, divisors


def _multiplicities(config, r):
    m = config.get("m", [1] * r)
    if len(m) != r or any(isinstance(v, bool) or not isinstance(v, int) or v < 1 for v in m):
        raise InputError(f"'m' must list {r} positive integers")
    return list(m)


def _positive(name, value):
    if not value > 0:
        raise InputError(f"{name} must be positive, got {value!r}")
    return value


# --- commands ------------------------------------------------------------------

def cmd_nu_bound(config, opts):
    kind, form, surface, divisors = load_problem(config)
    if kind == "curve":
        c = config["curve"]
        return {"curve_nu": format_fraction(curve_nu(c["L"], c["E"]))}
    if form is None:
        raise InputError("no divisors given")
    m = _multiplicities(config, form.r)
    if kind == "toric" and "L" in config:
        L = parse_divisor(surface, config["L"])
        pairs = [SurfacePair(intersection_number(L, L), intersection_number(L, d), intersection_number(d, d))
                 for d in divisors]
        bounds = [nu_lower_bound(p) for p in pairs]
        m = None
    else:
        bounds = list(integer_nu_bounds(form, m))
    return {"m": m, "nu_lower_bounds": [format_fraction(b) for b in bounds]}


def cmd_oracle_nu(config, opts):
    kind, form, surface, divisors = load_problem(config)
    n = _positive("n", opts.n)
    n0 = _positive("n0", opts.n0 if opts.n0 is not None else n)
    if kind == "curve":
        c = config["curve"]
        provider = CurveProvider(c["L"], c["E"])
        w = windowed_nu(provider, n0, n)
        return {"n": n, "truncated_nu": format_fraction(truncated_nu(provider, n)),
                "window_min": format_fraction(w.minimum), "exact_nu": format_fraction(curve_nu(c["L"], c["E"]))}
    if kind != "toric":
        raise InputError("oracle-nu needs toric or curve input")
    if "L" in config:
        L = parse_divisor(surface, config["L"])
    else:
        m = _multiplicities(config, len(divisors))
        L = sum((mi * d for mi, d in zip(m[1:], divisors[1:])), m[0] * divisors[0])
    rows = []
    for d in divisors:
        provider = ToricPairProvider(L, d)
        w = windowed_nu(provider, n0, n)
        pair = SurfacePair(intersection_number(L, L), intersection_number(L, d), intersection_number(d, d))
        rows.append({"truncated_nu": format_fraction(w.values[n]),
                     "window_min": format_fraction(w.minimum),
                     "nu_lower_bound": format_fraction(nu_lower_bound(pair))})
    return {"n": n, "n0": n0, "L": L.to_json(), "divisors": rows}


def _certificate_json(cert):
    return {
        "r": cert.r,
        "m": list(cert.m),
        "denominator": cert.denominator,
        "margins": [format_fraction(x) for x in cert.margins],
        "lhs": [format_fraction(x) for x in cert.lhs],
        "rhs": [format_fraction(x) for x in cert.rhs],
        "residual": cert.residual,
        "assumed_ample": cert.assumed_ample,
    }


def _solve(config, opts):
    kind, form, _, _ = load_problem(config)
    if form is None:
        raise InputError("solve-multiplicities needs an intersection form or toric divisors")
    cert = certify(form, _positive("tolerance", opts.tolerance), _positive("max-iter", opts.max_iter),
                   _positive("denominator-cap", opts.denominator_cap), assumed_ample=kind == "abstract")
    return kind, form, cert


def cmd_solve(config, opts):
    kind, form, cert = _solve(config, opts)
    nus = integer_nu_bounds(form, cert.m) if kind == "toric" else None
    doc = {
        "certificate": _certificate_json(cert),
        "assumptions": [ABSTRACT_ASSUMPTION if kind == "abstract" else TORIC_ASSUMPTION],
    }
    if nus is not None:
        doc["integer_nu_lower_bounds"] = [format_fraction(v) for v in nus]
    return doc


def verify_document(doc):
    """Re-derive a certificate document from its input echo alone."""
    if not isinstance(doc, dict) or "input" not in doc or "certificate" not in doc:
        raise InputError("not a certificate document: missing 'input' or 'certificate'")
    kind, form, _, _ = load_problem(doc["input"])
    if form is None:
        raise InputError("certificate input defines no divisors")
    c = doc["certificate"]
    try:
        m = c["m"]
        denominator = c["denominator"]
        stored = [parse_fraction(x) for x in c["margins"]]
        r = c["r"]
    except (KeyError, TypeError) as exc:
        raise CertificationError(f"malformed certificate: {exc}") from exc
    if r != form.r:
        raise CertificationError(f"certificate r = {r} but the form has r = {form.r}")
    lhs, rhs = certificate_sides(form, m, denominator)
    margins = [a - b for a, b in zip(lhs, rhs)]
    if stored != margins:
        raise CertificationError("stored margins differ from margins recomputed from the input")
    for key, values in (("lhs", lhs), ("rhs", rhs)):
        if key in c and [parse_fraction(x) for x in c[key]] != list(values):
            raise CertificationError(f"stored {key} differs from the recomputed values")
    if c.get("assumed_ample") != (kind == "abstract"):
        raise CertificationError("assumed_ample flag does not match the input kind")
    return {"verified": {"m": list(m), "denominator": denominator,
                         "margins": [format_fraction(x) for x in margins]}}


def cmd_verify(config, opts):
    return verify_document(config)


def cmd_proper_check(config, opts):
    kind, _, surface, _ = load_problem(config)
    if kind != "toric":
        raise InputError("proper-check needs toric input; abstract forms carry no support data")
    supports = []
    for i, spec in enumerate(config.get("divisors", [])):
        d = parse_divisor(surface, spec)
        supports.append(general_member(d, f"D{i + 1}") if spec.get("general") else support_of(d))
    report = proper_intersection_check(supports)
    if not report.ok:
        raise ProperFailure(report)
    return {"report": report.to_json()}


def cmd_adapted_basis(config, opts):
    kind, _, surface, divisors = load_problem(config)
    if kind != "toric":
        raise InputError("adapted-basis needs toric input")
    pair = config.get("pair", [1, 2])
    if len(pair) not in (1, 2) or any(not 1 <= p <= len(divisors) for p in pair):
        raise InputError(f"'pair' must name one or two of the {len(divisors)} divisors (1-based)")
    if "L" in config:
        L = parse_divisor(surface, config["L"])
    else:
        m = _multiplicities(config, len(divisors))
        L = sum((mi * d for mi, d in zip(m[1:], divisors[1:])), m[0] * divisors[0])
    b = _positive("b", config.get("b", 1))
    labels = [f"D{p}" for p in pair]
    space = from_toric(b * L, {f"D{p}": divisors[p - 1] for p in pair})
    basis = adapted_basis(space, labels)
    sums = {lab: {"mu_sum": mu_sum(space, basis, lab), "profile_sum": profile_sum(space, lab)} for lab in labels}
    return {
        "q": space.q,
        "b": b,
        "profiles": {lab: list(space.profiles[lab]) for lab in labels},
        "basis": [{"exponents": list(e.vector), "orders": [e.orders[lab] for lab in labels]}
                  for e in basis.elements],
        "sums": sums,
        "assumptions": ["bL very ample: assumed, not checked"],
    }


def cmd_find_b(config, opts):
    kind, form, surface, divisors = load_problem(config)
    if kind != "toric":
        raise InputError("find-b needs toric input")
    cert = None
    if "m" in config:
        m = _multiplicities(config, len(divisors))
    else:
        _, _, cert = _solve(config, opts)
        m = list(cert.m)
    if opts.epsilon is not None:
        eps = parse_fraction(opts.epsilon)
    elif "epsilon" in config:
        eps = parse_fraction(config["epsilon"])
    else:
        if cert is None:
            lhs, rhs = certificate_sides(form, m, sum(m))
            cert = NuCertificate(tuple(m), sum(m), lhs, rhs, False, 0.0, form)
        eps = epsilon_from_certificate(cert, form)
    result = find_epsilon_b(None, divisors, m, eps, _positive("b-cap", opts.b_cap))
    return {
        "m": m,
        "epsilon": format_fraction(result.epsilon),
        "b": result.b,
        "q": result.q,
        "sums": list(result.sums),
        "thresholds": [format_fraction(t) for t in result.thresholds],
        "assumptions": ["bL very ample: assumed, not checked"],
    }


HANDLERS = {
    "nu-bound": cmd_nu_bound,
    "oracle-nu": cmd_oracle_nu,
    "solve-multiplicities": cmd_solve,
    "verify-certificate": cmd_verify,
    "proper-check": cmd_proper_check,
    "adapted-basis": cmd_adapted_basis,
    "find-b": cmd_find_b,
}


def default_options(**overrides):
    opts = argparse.Namespace(tolerance=DEFAULT_TOLERANCE, max_iter=DEFAULT_MAX_ITER,
                              denominator_cap=DEFAULT_DENOMINATOR_CAP, b_cap=100, epsilon=None,
                              n=50, n0=None, output=None)
    for k, v in overrides.items():
        setattr(opts, k, v)
    return opts


def run(config, command, opts=None):
    """Dispatch ``command`` on a parsed config; return (document, exit code)."""
    opts = opts or default_options()
    if command not in HANDLERS:
        return _error_doc(command, config, InputError(f"unknown command {command!r}")), 1
    try:
        payload = HANDLERS[command](config, opts)
    except NucertError as exc:
        return _error_doc(command, config, exc), exc.exit_code
    except (KeyError, TypeError, ValueError) as exc:
        return _error_doc(command, config, InputError(f"malformed configuration: {exc!r}")), 1
    doc = {"schema": SCHEMA, "tool": f"nucert {__version__}", "command": command,
           "input": config, "status": "valid"}
    doc.update(payload)
    return doc, 0


def _error_doc(command, config, exc):
    doc = {"schema": SCHEMA, "tool": f"nucert {__version__}", "command": command, "input": config,
           "status": "error", "error": {"kind": type(exc).__name__, "message": str(exc)}}
    report = getattr(exc, "report", None)
    if report is not None:
        doc["report"] = report.to_json()
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON problem file, or - for stdin")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    common.add_argument("--denominator-cap", type=int, default=DEFAULT_DENOMINATOR_CAP)
    common.add_argument("--b-cap", type=int, default=100)
    common.add_argument("--epsilon", help="rational 'p/q'")
    common.add_argument("--n", type=int, default=50, help="truncation level for oracle-nu")
    common.add_argument("--n0", type=int, default=None, help="window start for oracle-nu")
    common.add_argument("--output", "-o", help="output path (default stdout)")
    parser = argparse.ArgumentParser(prog="nucert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nucert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if opts.config == "-" else open(opts.config, encoding="utf-8").read()
    except OSError as exc:
        print(f"nucert: cannot read {opts.config}: {exc}", file=sys.stderr)
        return 1
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"nucert: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 1
    doc, code = run(config, opts.command, opts)
    out = dumps(doc)
    if opts.output:
        with open(opts.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if code:
        print(f"nucert: {doc['error']['kind']}: {doc['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
