"""Command-line entry point: verification suites and data emitters.

    phonlcs verify {moments,identity,orthonormality,bargmann-basis,bessel-identity,kdf-identity,positivity}
    phonlcs emit {sequence,normalization,photon,weight,wavefunction}
    phonlcs rerun REPORT.json

Reports go to stdout (or ``--out``) as JSON (``meta`` + ``rows``) or CSV.
Exit status: 0 success, 1 a verification case failed, 2 usage or domain
error.  Errors are printed to stderr as JSON with a machine-readable code.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__, bargmann, measure, nlcs, pho, quad
from .errors import NLCSError, ParameterOutOfDomain

SUITES = ("moments", "identity", "orthonormality", "bargmann-basis", "bessel-identity", "kdf-identity", "positivity")
EMITTERS = ("sequence", "normalization", "photon", "weight", "wavefunction")

# pass thresholds per suite (overridable with --threshold)
THRESHOLDS = {
    "moments": 1e-6,
    "identity": 1e-6,
    "orthonormality": 1e-8,
    "bargmann-basis": 1e-6,
    "bessel-identity": 1e-7,
    "kdf-identity": 1e-6,
    "positivity": 1e-6,
}


class UsageError(NLCSError):
    code = "USAGE_ERROR"


# -- formatting ------------------------------------------------------------------


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_text(obj: Any) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt_float(obj)
        return s if s not in ("nan", "inf", "-inf") else json.dumps(s)
    if isinstance(obj, complex):
        return _json_text([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_text(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cells(row: Dict[str, Any]) -> Dict[str, str]:
    out = {}
    for key, val in row.items():
        if isinstance(val, complex):
            out[f"re_{key}"] = fmt_float(val.real)
            out[f"im_{key}"] = fmt_float(val.imag)
        elif isinstance(val, bool):
            out[key] = "true" if val else "false"
        elif isinstance(val, (float, np.floating)):
            out[key] = fmt_float(val)
        else:
            out[key] = str(val)
    return out


def render(report: Dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return _json_text(report) + "\n"
    buf = io.StringIO()
    buf.write("# meta: " + _json_text(report["meta"]) + "\n")
    cells = [_csv_cells(r) for r in report["rows"]]
    if cells:
        header = list(cells[0].keys())
        buf.write(",".join(header) + "\n")
        for c in cells:
            buf.write(",".join(c.get(h, "") for h in header) + "\n")
    return buf.getvalue()


# -- argument handling --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"--z expects re[,im], got {text!r}")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--gamma", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--z", type=str, help="complex point as re[,im]")
    p.add_argument("--zz", type=float, help="|z|^2 for the normalization factor")
    p.add_argument("--n-max", type=int)
    p.add_argument("--xi-min", type=float)
    p.add_argument("--xi-max", type=float)
    p.add_argument("--xi-steps", type=int)
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float, default=1e-15)
    p.add_argument("--threshold", type=float, help="pass threshold for verification residuals")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=str)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phonlcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"phonlcs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("target", choices=SUITES)
    _add_common(v)
    e = sub.add_parser("emit", help="emit a table of values")
    e.add_argument("target", choices=EMITTERS)
    _add_common(e)
    r = sub.add_parser("rerun", help="re-run the command recorded in a JSON report")
    r.add_argument("report")
    r.add_argument("--out", type=str)
    return parser


_ARG_KEYS = (
    "gamma", "sigma", "mu", "alpha", "beta", "z", "zz", "n_max",
    "xi_min", "xi_max", "xi_steps", "rel_tol", "abs_tol", "threshold", "format",
)


def _recorded_args(ns: argparse.Namespace) -> Dict[str, Any]:
    return {k: getattr(ns, k) for k in _ARG_KEYS}


def _need(ns, *names):
    missing = [n for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _params(ns) -> nlcs.Params:
    _need(ns, "gamma", "sigma")
    return nlcs.classify(ns.gamma, ns.sigma)


def _admissible(ns) -> nlcs.Params:
    p = _params(ns)
    if p.domain_class is not nlcs.DomainClass.MEASURE_ADMISSIBLE:
        raise ParameterOutOfDomain(
            f"(gamma, sigma) = ({p.gamma}, {p.sigma}) is {p.domain_class.value}; "
            "measure suites need (gamma, sigma) in S1 u S2"
        )
    return p


def _valid(ns) -> nlcs.Params:
    return nlcs.require_valid(_params(ns))


def _oscillator(ns) -> pho.OscillatorConfig:
    if ns.mu is not None and ns.alpha is not None:
        raise UsageError("give either --mu or --alpha, not both")
    if ns.mu is not None:
        return pho.OscillatorConfig.from_mu(ns.mu, ns.beta)
    if ns.alpha is not None:
        return pho.OscillatorConfig(ns.alpha, ns.beta)
    raise UsageError("missing --mu or --alpha")


def _bspec(ns) -> bargmann.BargmannSpec:
    return bargmann.BargmannSpec(_oscillator(ns), 0.0 if ns.sigma is None else ns.sigma)


def _z(ns, default: str) -> complex:
    return parse_complex(ns.z if ns.z is not None else default)


def _rel_tol(ns, default: float) -> float:
    tol = default if ns.rel_tol is None else ns.rel_tol
    if not 0 < tol < 1:
        raise UsageError("--rel-tol must lie in (0, 1)")
    return tol


def _xi_grid(ns, lo: float, hi: float, steps: int) -> np.ndarray:
    lo = lo if ns.xi_min is None else ns.xi_min
    hi = hi if ns.xi_max is None else ns.xi_max
    steps = steps if ns.xi_steps is None else ns.xi_steps
    if not (0 < lo < hi) or steps < 2:
        raise UsageError("grid needs 0 < xi-min < xi-max and xi-steps >= 2")
    return np.linspace(lo, hi, steps)


def _log_grid(ns, lo: float, hi: float, steps: int) -> np.ndarray:
    lo = lo if ns.xi_min is None else ns.xi_min
    hi = hi if ns.xi_max is None else ns.xi_max
    steps = steps if ns.xi_steps is None else ns.xi_steps
    if not (0 < lo < hi) or steps < 2:
        raise UsageError("grid needs 0 < xi-min < xi-max and xi-steps >= 2")
    return np.logspace(math.log10(lo), math.log10(hi), steps)


def _case(index: int, residual: float, threshold: float, **fields) -> Dict[str, Any]:
    row = {"case": index}
    row.update(fields)
    row["residual"] = float(residual)
    row["pass"] = bool(abs(residual) <= threshold)
    return row


def _failed_case(index: int, err: NLCSError, **fields) -> Dict[str, Any]:
    row = {"case": index}
    row.update(fields)
    row["residual"] = float("nan")
    row["pass"] = False
    row["code"] = err.code
    return row


# -- suites ----------------------------------------------------------------------


def verify_moments(ns, thr):
    p = _admissible(ns)
    n_max = 8 if ns.n_max is None else ns.n_max
    tol = _rel_tol(ns, 1e-9)
    rows = []
    for r in measure.moments(p, n_max, tol):
        rows.append(_case(r.n, r.rel_deviation, thr, n=r.n, value=r.value, target=r.target))
    return rows


def verify_identity(ns, thr):
    p = _admissible(ns)
    n_max = 8 if ns.n_max is None else ns.n_max
    mat = measure.identity_resolution_check(p, n_max, _rel_tol(ns, 1e-9))
    rows = []
    for n in range(n_max + 1):
        for k in range(n_max + 1):
            expected = 1.0 if n == k else 0.0
            rows.append(_case(len(rows), mat[n, k] - expected, thr, n=n, k=k, value=mat[n, k], expected=expected))
    return rows


def verify_orthonormality(ns, thr):
    osc = _oscillator(ns)
    n_max = 12 if ns.n_max is None else ns.n_max
    gram = pho.gram_matrix(osc, n_max, _rel_tol(ns, 1e-12))
    rows = []
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            expected = 1.0 if n == m else 0.0
            rows.append(_case(len(rows), gram[n, m] - expected, thr, n=n, m=m, value=gram[n, m], expected=expected))
    return rows


def verify_bargmann_basis(ns, thr):
    spec = _bspec(ns)
    z = _z(ns, "0.5")
    n_max = 8 if ns.n_max is None else ns.n_max
    tol = _rel_tol(ns, 1e-10)
    rows = []
    for n in range(n_max + 1):
        exact = bargmann.basis_image_exact(spec, n, z)
        try:
            got = bargmann.basis_image(spec, n, z, tol)
        except NLCSError as err:
            rows.append(_failed_case(n, err, n=n, expected=exact))
            continue
        rows.append(_case(n, abs(got / exact - 1.0), thr, n=n, value=got, expected=exact))
    return rows


def verify_bessel_identity(ns, thr):
    spec = _bspec(ns)
    if spec.sigma != 0.0:
        raise ParameterOutOfDomain("bessel-identity needs sigma = 0")
    z = _z(ns, "1")
    n_max = 8 if ns.n_max is None else ns.n_max
    tol = _rel_tol(ns, 1e-12)
    rows = []
    for n in range(n_max + 1):
        try:
            c = bargmann.bessel_identity_check(spec, n, z, tol)
        except NLCSError as err:
            rows.append(_failed_case(n, err, n=n))
            continue
        rows.append(_case(n, c.residual, thr, n=n, lhs=c.lhs, rhs=c.rhs, alt_rhs=c.alt_rhs))
    return rows


def verify_kdf_identity(ns, thr):
    spec = _bspec(ns)
    z = _z(ns, "0.9")
    n_max = 8 if ns.n_max is None else ns.n_max
    tol = _rel_tol(ns, 1e-12)
    rows = []
    for n in range(n_max + 1):
        try:
            c = bargmann.kdf_identity_check(spec, n, z, tol)
        except NLCSError as err:
            rows.append(_failed_case(n, err, n=n))
            continue
        rows.append(_case(n, c.residual, thr, n=n, lhs=c.lhs, rhs=c.rhs))
    return rows


def verify_positivity(ns, thr):
    p = _admissible(ns)
    r = _log_grid(ns, 1e-6, 50.0, 40)
    tol = _rel_tol(ns, 1e-10)
    paths = measure.admissible_paths(p)
    values = {}
    for path in paths:
        values[path] = measure.WeightEvaluator(p, path, measure._rel_cfg(tol)).weight(r).value
    default = measure.default_path(p)
    rows = []
    for i, x in enumerate(r):
        m = float(values[default][i])
        spread = 0.0
        for path in paths:
            spread = max(spread, abs(values[path][i] / m - 1.0)) if m > 0 else math.inf
        row = _case(i, spread, thr, r=float(x), weight=m, path=default.value, paths_compared=len(paths))
        row["pass"] = bool(m > 0 and row["pass"])
        rows.append(row)
    return rows


VERIFY = {
    "moments": verify_moments,
    "identity": verify_identity,
    "orthonormality": verify_orthonormality,
    "bargmann-basis": verify_bargmann_basis,
    "bessel-identity": verify_bessel_identity,
    "kdf-identity": verify_kdf_identity,
    "positivity": verify_positivity,
}


# -- emitters ------------------------------------------------------------------


def emit_sequence(ns):
    p = _valid(ns)
    n_max = 10 if ns.n_max is None else ns.n_max
    return [
        {"n": n, "x_n": nlcs.sequence_term(p, n), "x_n_factorial": nlcs.generalized_factorial(p, n)}
        for n in range(n_max + 1)
    ]


def emit_normalization(ns):
    p = _valid(ns)
    _need(ns, "zz")
    s = nlcs.normalization(p, ns.zz, _rel_tol(ns, 1e-15))
    return [{"zz": ns.zz, "value": float(s.value), "terms": s.terms_used, "tail": s.tail_estimate}]


def emit_photon(ns):
    p = _valid(ns)
    n_max = 20 if ns.n_max is None else ns.n_max
    d = nlcs.photon_distribution(nlcs.StateSpec(p, _z(ns, "1")), n_max, _rel_tol(ns, 1e-15))
    rows = [{"n": str(n), "p_n": float(v)} for n, v in enumerate(d.probabilities)]
    rows.append({"n": f">{n_max}", "p_n": d.tail})
    return rows


def emit_weight(ns):
    p = _admissible(ns)
    r = _log_grid(ns, 1e-6, 50.0, 40)
    ev = measure.WeightEvaluator(p, None, measure._rel_cfg(_rel_tol(ns, 1e-10)))
    res = ev.weight(r)
    return [{"r": float(x), "m": float(v), "path": ev.path.value} for x, v in zip(r, res.value)]


def emit_wavefunction(ns):
    spec = _bspec(ns)
    z = _z(ns, "0")
    xi = _xi_grid(ns, 0.05, 6.0, 60)
    psi = bargmann.wavefunction(spec, z, xi, _rel_tol(ns, 1e-15))
    return [{"xi": float(x), "psi": complex(v)} for x, v in zip(xi, psi)]


EMIT = {
    "sequence": emit_sequence,
    "normalization": emit_normalization,
    "photon": emit_photon,
    "weight": emit_weight,
    "wavefunction": emit_wavefunction,
}


# -- driver ----------------------------------------------------------------------


def _warnings(ns) -> List[str]:
    if ns.gamma is None or ns.sigma is None:
        return []
    w = nlcs.classify(ns.gamma, ns.sigma).warning
    return [w] if w else []


def execute(command: str, target: str, ns: argparse.Namespace) -> Dict[str, Any]:
    """Run one command and return the report (raises NLCSError on bad input)."""
    meta = {
        "tool": "phonlcs",
        "version": __version__,
        "command": command,
        "target": target,
        "args": _recorded_args(ns),
        "max_evaluations": quad.default_max_evaluations(),
        "warnings": _warnings(ns),
    }
    if command == "verify":
        thr = THRESHOLDS[target] if ns.threshold is None else ns.threshold
        meta["threshold"] = thr
        rows = VERIFY[target](ns, thr)
        meta["passed"] = all(r["pass"] for r in rows)
    else:
        rows = EMIT[target](ns)
    return {"meta": meta, "rows": rows}


def _namespace_from_report(path: str) -> argparse.Namespace:
    try:
        with open(path, encoding="utf-8") as fh:
            meta = json.load(fh)["meta"]
        args = dict(meta["args"])
        ns = argparse.Namespace(**{k: args.get(k) for k in _ARG_KEYS})
        ns.command, ns.target = meta["command"], meta["target"]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read report {path!r}: {exc}") from exc
    return ns


def _error_exit(err: NLCSError) -> int:
    sys.stderr.write(_json_text({"error": {"code": err.code, "message": str(err)}}) + "\n")
    return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except UsageError as err:
        return _error_exit(err)
    out = ns.out
    if ns.command == "rerun":
        try:
            ns = _namespace_from_report(ns.report)
        except UsageError as err:
            return _error_exit(err)
    env = os.environ.get("NLCS_MAX_EVALS")
    try:
        if env is not None:
            try:
                quad.set_default_max_evaluations(int(env))
            except ValueError as exc:
                raise UsageError(f"NLCS_MAX_EVALS must be an integer >= 100, got {env!r}") from exc
        start = time.perf_counter()
        report = execute(ns.command, ns.target, ns)
    except NLCSError as err:
        return _error_exit(err)
    finally:
        quad.set_default_max_evaluations(None)
    text = render(report, ns.format or "json")
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    # wall time goes to stderr so that reports stay byte-identical across runs
    sys.stderr.write(f"elapsed {time.perf_counter() - start:.3f} s\n")
    if ns.command == "verify" and not report["meta"]["passed"]:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
