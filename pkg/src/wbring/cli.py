"""Command-line entry point ``wbring``.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import classify, necklace, rings, transfer, verify
from .exactmath import IntegralityError, MultiPoly, NonUnitError, QPoly
from .poset import PosetError, build_cyclic, build_finite_abelian, divisors, mu_q, poset_from_json, zeta_q

__all__ = ["main", "run", "build_parser"]

VERBS = (
    "poset",
    "ghost",
    "add",
    "mul",
    "neg",
    "necklace",
    "structure",
    "pcoeffs",
    "tau",
    "frobenius",
    "lenart",
    "classify",
    "verify",
)


class UsageError(Exception):
    pass


def _q_arg(text: str):
    if text == rings.SYM:
        return rings.SYM
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--q expects an integer or 'sym', got {text!r}") from None


def _add_poset_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--poset", metavar="FILE", help="poset JSON document")
    g.add_argument("--cyclic", type=int, metavar="N", help="divisors of N in the procyclic group")
    g.add_argument("--abelian", metavar="a,b,...", help="invariant factors of a finite abelian group")


def _add_common(p: argparse.ArgumentParser, fmt: str = "json") -> None:
    p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=fmt)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wbring", description="q-deformed Witt-Burnside and necklace rings")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("poset", help="table of marks, zeta and Moebius matrices")
    _add_poset_flags(p)
    _add_common(p)

    for verb, helptext in (("ghost", "ghost map of a vector"), ("neg", "additive inverse")):
        p = sub.add_parser(verb, help=helptext)
        p.add_argument("--vector", action="append", required=True, metavar="FILE")
        p.add_argument("--q", type=_q_arg, default=1)
        _add_poset_flags(p)
        _add_common(p)
    for verb in ("add", "mul"):
        p = sub.add_parser(verb, help=f"{verb} two vectors in their ring")
        p.add_argument("--vector", action="append", required=True, metavar="FILE")
        p.add_argument("--q", type=_q_arg, default=1)
        _add_poset_flags(p)
        _add_common(p)

    p = sub.add_parser("necklace", help="orbit-sum polynomials")
    _add_poset_flags(p)
    p.add_argument("--q", type=_q_arg, default=rings.SYM)
    p.add_argument("--symbolic", action="store_true", help="keep q symbolic (the default)")
    p.add_argument("--vars", type=int, default=0, metavar="M", help="use M variables in power-sum form")
    p.add_argument("--element", help="only this poset element")
    _add_common(p, "csv")

    p = sub.add_parser("structure", help="universal sum/product/negation polynomials")
    _add_poset_flags(p)
    p.add_argument("--q", type=_q_arg, default=rings.SYM)
    _add_common(p)

    p = sub.add_parser("pcoeffs", help="necklace product coefficients")
    _add_poset_flags(p)
    _add_common(p)

    p = sub.add_parser("tau", help="q-Teichmueller map (or its inverse)")
    p.add_argument("--vector", action="append", required=True, metavar="FILE")
    p.add_argument("--q", type=_q_arg, default=1)
    p.add_argument("--inverse", action="store_true")
    _add_poset_flags(p)
    _add_common(p)

    p = sub.add_parser("frobenius", help="cyclic q-Frobenius (q-restriction)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--vector", action="append", metavar="FILE")
    p.add_argument("--q", type=_q_arg, default=rings.SYM)
    _add_poset_flags(p)
    _add_common(p)

    p = sub.add_parser("lenart", help="Frobenius expansion coefficients Q_{r,n,d}")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int)
    _add_common(p)

    p = sub.add_parser("classify", help="strict isomorphism between the q- and r-deformations")
    _add_poset_flags(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(verify.SUITES) + ["all"])
    p.add_argument("--rmax", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    _add_common(p)
    return parser


# --------------------------------------------------------------------------
# input helpers
# --------------------------------------------------------------------------


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _poset(args, required: bool = True):
    if getattr(args, "poset", None):
        return poset_from_json(_load_json(args.poset))
    if getattr(args, "cyclic", None):
        if args.cyclic < 1:
            raise UsageError("--cyclic expects a positive integer")
        return build_cyclic(divisors(args.cyclic))
    if getattr(args, "abelian", None):
        try:
            inv = [int(x) for x in args.abelian.split(",") if x.strip()]
        except ValueError:
            raise UsageError("--abelian expects comma-separated integers") from None
        return build_finite_abelian(inv)
    if required:
        raise UsageError("one of --poset, --cyclic or --abelian is required")
    return None


def _vectors(args, count: int) -> list[rings.RingVector]:
    paths = args.vector or []
    if len(paths) != count:
        raise UsageError(f"{args.verb} needs exactly {count} --vector argument(s)")
    override = _poset(args, required=False)
    out = []
    for path in paths:
        doc = _load_json(path)
        if override is None and "poset" not in doc:
            raise UsageError(f"{path} names no poset; pass --poset, --cyclic or --abelian")
        out.append(rings.RingVector.from_json(doc, override))
    return out


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _vector_rows(v: rings.RingVector):
    return [(l, str(x)) for l, x in zip(v.poset.labels, v.entries)]


# --------------------------------------------------------------------------
# verbs
# --------------------------------------------------------------------------


def _cmd_poset(args):
    P = _poset(args)
    mu = mu_q(P, twisted=False)
    bold = {}
    for (v, w), (c, _) in mu.entries.items():
        bold[(v, w)] = c * P.index[v]
    doc = {
        "poset": P.to_json(),
        "zeta_q": zeta_q(P).to_json(),
        "mu_q": mu_q(P).to_json(),
        "bold_mu_integral": all(c.is_integral() for c in bold.values()),
    }
    if args.format == "csv":
        rows = [(l, P.index[i], " ".join(map(str, P.marks[i]))) for i, l in enumerate(P.labels)]
        return _dump_csv(["element", "index", "marks"], rows), 0
    return _dump_json(doc), 0


def _emit_vector(args, v):
    if args.format == "csv":
        return _dump_csv(["element", "value"], _vector_rows(v)), 0
    return _dump_json(v.to_json()), 0


def _cmd_ghost(args):
    (v,) = _vectors(args, 1)
    if v.kind == "witt":
        g = rings.ghost_witt(args.q, v)
    elif v.kind in ("nr", "nr_hat"):
        g = rings.ghost_necklace(args.q, v)
    else:
        raise UsageError("the vector is already a ghost vector")
    return _emit_vector(args, g)


def _cmd_binary(args):
    a, b = _vectors(args, 2)
    if a.kind != b.kind:
        raise UsageError("both vectors must have the same kind")
    if a.kind == "witt":
        fn = rings.witt_add if args.verb == "add" else rings.witt_mul
        out = fn(args.q, a, b)
    elif a.kind in ("nr", "nr_hat"):
        out = rings.nr_add(a, b) if args.verb == "add" else rings.nr_mul(args.q, a, b)
    else:
        op = a.ring.add if args.verb == "add" else a.ring.mul
        out = a.with_entries([op(x, y) for x, y in zip(a.entries, b.entries)])
    return _emit_vector(args, out)


def _cmd_neg(args):
    (a,) = _vectors(args, 1)
    if a.kind == "witt":
        out = rings.witt_neg(args.q, a)
    else:
        out = a.with_entries([a.ring.neg(x) for x in a.entries])
    return _emit_vector(args, out)


def _cmd_necklace(args):
    P = _poset(args)
    mode = args.vars if args.vars else "univariate"
    elems = [P.position(args.element)] if args.element else range(len(P))
    polys = []
    for e in elems:
        f = necklace.orbit_sum(P, e, mode).value
        if args.q != rings.SYM:
            f = f.specialize_q(args.q)
        polys.append((P.labels[e], f))
    if args.format == "csv":
        return _dump_csv(["element", "polynomial"], [(l, str(f)) for l, f in polys]), 0
    doc = {"poset": P.describe(), "q": args.q, "orbit_sums": {l: f.to_json() for l, f in polys}}
    return _dump_json(doc), 0


def _cmd_structure(args):
    P = _poset(args)
    t = rings.structure_table(P, args.q)
    if args.format == "csv":
        rows = [(l, str(s), str(p), str(i)) for l, s, p, i in zip(P.labels, t.s, t.p, t.iota)]
        return _dump_csv(["element", "sum", "product", "negation"], rows), 0
    return _dump_json(t.to_json()), 0


def _cmd_pcoeffs(args):
    P = _poset(args)
    t = rings.p_coeffs(P)
    if args.format == "csv":
        L = P.labels
        rows = [(L[u], L[v], L[w], str(c)) for (u, v, w), c in sorted(t.entries.items())]
        return _dump_csv(["U", "V", "W", "P"], rows), 0
    return _dump_json(t.to_json()), 0


def _cmd_tau(args):
    (v,) = _vectors(args, 1)
    out = transfer.tau_inverse(args.q, v) if args.inverse else transfer.tau(args.q, v)
    return _emit_vector(args, out)


def _cmd_frobenius(args):
    if args.vector:
        (v,) = _vectors(args, 1)
        return _emit_vector(args, transfer.frobenius_cyclic(args.q, args.r, v))
    P = _poset(args)
    if args.r not in P.index:
        raise UsageError(f"index {args.r} is not in the poset")
    mat = transfer.restriction_matrix(P, P.index.index(args.r))
    if args.format == "csv":
        sub, _ = P.subposet(P.index.index(args.r))
        rows = [
            (sub.labels[i], P.labels[j], str(c), k) for (i, j), (c, k) in sorted(mat.entries.items())
        ]
        return _dump_csv(["V", "W", "Q", "adams"], rows), 0
    return _dump_json({"poset": P.describe(), "r": args.r, "restriction": mat.to_json()}), 0


def _cmd_lenart(args):
    ds = [args.d] if args.d else divisors(args.n)
    table = [(d, transfer.lenart_Q(args.r, args.n, d)) for d in ds]
    if args.format == "csv":
        return _dump_csv(["r", "n", "d", "Q"], [(args.r, args.n, d, str(c)) for d, c in table]), 0
    doc = {"r": args.r, "n": args.n, "Q": {str(d): c.to_json() for d, c in table}}
    return _dump_json(doc), 0


def _cmd_classify(args):
    P = _poset(args)
    d = classify.strict_iso_over_Z(P, args.q, args.r)
    doc = {
        "poset": P.describe(),
        "q": args.q,
        "r": args.r,
        "exists": d["exists"],
        "obstruction_primes": d["obstruction_primes"],
        "transfer": d["transfer"],
    }
    if args.format == "csv":
        rows = [(l, y) for l, y in d["transfer"].items()]
        return _dump_csv(["element", "Y"], rows), 0
    return _dump_json(doc), 0


_SUITE_PARAMS = {
    "integrality": ("nmax", "rmax"),
    "lenart": ("nmax", "rmax"),
    "ring-axioms": ("trials", "seed"),
    "teichmuller": ("seed",),
    "mackey": ("trials",),
    "classical": ("nmax", "trials", "seed"),
}


def _cmd_verify(args):
    params = {}
    for name in _SUITE_PARAMS.get(args.suite, ()):
        val = getattr(args, name)
        if val is not None:
            params[name] = val
    reports = verify.run_suite(args.suite, **params)
    ok = all(r["status"] == "pass" for r in reports)
    if args.format == "csv":
        rows = [(r["identity"], json.dumps(r["poset"], sort_keys=True), json.dumps(r["params"], sort_keys=True), r["status"]) for r in reports]
        return _dump_csv(["identity", "poset", "params", "status"], rows), 0 if ok else 1
    return _dump_json({"suite": args.suite, "status": "pass" if ok else "fail", "reports": reports}), 0 if ok else 1


HANDLERS = {
    "poset": _cmd_poset,
    "ghost": _cmd_ghost,
    "add": _cmd_binary,
    "mul": _cmd_binary,
    "neg": _cmd_neg,
    "necklace": _cmd_necklace,
    "structure": _cmd_structure,
    "pcoeffs": _cmd_pcoeffs,
    "tau": _cmd_tau,
    "frobenius": _cmd_frobenius,
    "lenart": _cmd_lenart,
    "classify": _cmd_classify,
    "verify": _cmd_verify,
}


def run(argv=None, stdout=None) -> int:
    """Parse ``argv`` and execute the verb; returns the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = HANDLERS[args.verb](args)
    except (UsageError, PosetError, KeyError, ValueError) as exc:
        if isinstance(exc, (IntegralityError, NonUnitError)):
            print(f"wbring: {exc}", file=sys.stderr)
            return 1
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"wbring {args.verb}: {msg}", file=sys.stderr)
        return 2
    except (IntegralityError, NonUnitError) as exc:
        print(f"wbring {args.verb}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
