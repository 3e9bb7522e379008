"""Command-line interface: ``spirkit <group> <verb> [flags]``.

Exit codes: 0 success, 1 verification/audit failure, 2 usage or input error.
Errors print one line to stderr: ``error: <CODE>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import access as acc
from . import audit, gf, mmsp, nss, simnet, spir
from .errors import InvariantViolation, SpirkitError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# --- IO helpers --------------------------------------------------------------

def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError("IO", f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError("JSON", f"{path}: {exc.msg} at line {exc.lineno}") from None


def _write(out: str, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CliError("IO", f"cannot write {out}: {exc.strerror or exc}") from None


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def _kind(data, allowed: tuple) -> None:
    if not isinstance(data, dict):
        raise CliError("SCHEMA", "expected a JSON object")
    kind = data.get("kind")
    if kind is not None and kind not in allowed:
        raise CliError("SCHEMA", f"expected kind in {allowed}, got {kind!r}")


def load_access(path: str) -> acc.AccessStructure:
    return acc.AccessStructure.from_dict(_read_json(path))


def load_mmsp(path: str) -> mmsp.Mmsp:
    data = _read_json(path)
    _kind(data, ("mmsp", "nss"))
    return mmsp.Mmsp.from_dict(data)


def load_nss(path: str) -> nss.LinearNss:
    data = _read_json(path)
    _kind(data, ("nss", "mmsp"))
    return nss.LinearNss.from_dict(data)


def load_spir(path: str) -> spir.ProjectedLinearSpir:
    data = _read_json(path)
    _kind(data, ("spir",))
    return spir.ProjectedLinearSpir.from_dict(data)


def load_matrix(path: str) -> gf.FieldMatrix:
    data = _read_json(path)
    if isinstance(data, dict) and "g" in data and "rows" not in data:
        data = {"q": data.get("q"), "rows": data["g"]}
    return gf.FieldMatrix.from_dict(data)


def _parse_set(text: str) -> frozenset:
    text = text.strip().strip("{}")
    if not text:
        return frozenset()
    try:
        return frozenset(int(t) for t in text.split(","))
    except ValueError:
        raise CliError("USAGE", f"cannot parse party set {text!r}") from None


def _fmt_set(s) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


# --- commands ---------------------------------------------------------------

def cmd_mmsp_verify(args) -> int:
    m = load_mmsp(args.input)
    verdict = mmsp.verify(m, load_access(args.access))
    if args.format == "json":
        _write(args.out, _dump(verdict.to_dict()))
    elif verdict.valid:
        _write(args.out, f"valid rate={verdict.rate}")
    else:
        parts = ["invalid"]
        if verdict.failing_authorized:
            parts.append("not-accepted=" + ";".join(_fmt_set(s) for s in verdict.failing_authorized))
        if verdict.failing_forbidden:
            parts.append("not-rejected=" + ";".join(_fmt_set(s) for s in verdict.failing_forbidden))
        _write(args.out, " ".join(parts))
    return EXIT_OK if verdict.valid else EXIT_FAIL


def cmd_mmsp_vandermonde(args) -> int:
    points = None if args.points is None else [int(p) for p in args.points.split(",")]
    m = mmsp.vandermonde_mmsp(args.q, args.n, args.r, args.t, points)
    _write(args.out, _dump(m.to_dict()))
    return EXIT_OK


def cmd_mmsp_search(args) -> int:
    m = mmsp.search_mmsp(load_access(args.access), args.q, args.x, args.y, args.max_z, _budget(args))
    _write(args.out, _dump(m.to_dict()))
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.conversion == "nss-to-mmsp":
        out = nss.nss_to_mmsp(load_nss(args.input)).to_dict()
    elif args.conversion == "mmsp-to-spir":
        out = spir.mmsp_to_spir(load_mmsp(args.input), args.f).to_dict()
    elif args.conversion == "spir-to-nss":
        out = spir.spir_to_nss(load_spir(args.input)).to_dict()
    else:
        out = spir.project(load_spir(args.input)).to_dict()
    _write(args.out, _dump(out))
    return EXIT_OK


def cmd_audit(args) -> int:
    structure = load_access(args.access)
    if args.target == "spir":
        report = audit.audit_spir(load_spir(args.input), structure, _budget(args))
    else:
        report = audit.audit_nss(load_nss(args.input), structure, _budget(args))
    if args.format == "json":
        _write(args.out, _dump(report.to_dict()))
    else:
        line = f"alpha={report.alpha} beta_bits={report.beta_bits:.6g}"
        if report.gamma_bits is not None:
            line += f" gamma_bits={report.gamma_bits:.6g}"
        line += " complete_security=" + ("yes" if report.completely_secure else "no")
        _write(args.out, line)
    return EXIT_OK if report.completely_secure else EXIT_FAIL


def cmd_bound_delta(args) -> int:
    structure = load_access(args.access)
    d = acc.delta(structure)
    bound = acc.rate_bound(structure)
    if args.format == "json":
        _write(args.out, _dump({"delta": d, "n": structure.n, "bound": str(bound)}))
    else:
        _write(args.out, f"delta={d} bound={bound}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    p = load_spir(args.input)
    files = "random" if args.files is None else tuple(int(e) for e in args.files.split(","))
    cfg = simnet.SessionConfig(
        p, args.k, _parse_set(args.respond), _parse_set(args.collude), args.seed, files
    )
    if args.trials:
        summary = simnet.sweep_sessions(cfg, args.trials)
        if args.format == "json":
            _write(args.out, _dump(summary.to_dict()))
        else:
            lines = [f"respond={r} " + " ".join(f"{k}={v}" for k, v in sorted(c.items()))
                     for r, c in summary.outcomes.items()]
            _write(args.out, "\n".join(lines))
        return EXIT_OK
    trace = simnet.run_session(cfg)
    _write(args.out, trace.to_json() if args.format == "json" else trace.to_text())
    return EXIT_OK


def cmd_check(args) -> int:
    if args.claim == "theorem1":
        cond_a, cond_b = mmsp.theorem1_check(load_matrix(args.input), args.r, args.t)
        ok = cond_a == cond_b
        _write(args.out, f"mmsp={str(cond_a).lower()} mds={str(cond_b).lower()} agree={str(ok).lower()}")
    elif args.claim == "lemma2":
        m = load_mmsp(args.input)
        bad = [s for s in acc.all_subsets(m.n)
               if mmsp.rejects_definitional(m, s) != mmsp.rejects_rank(m, s)]
        ok = not bad
        _write(args.out, f"subsets={2 ** m.n} disagreements={len(bad)}")
    elif args.claim == "lemma3":
        if args.access is None:
            raise CliError("USAGE", "check lemma3 needs --access")
        witness = audit.lemma3_witness(load_mmsp(args.input), load_access(args.access), _budget(args))
        ok = witness is None
        _write(args.out, "holds" if ok else f"fails B={_fmt_set(witness[0])} secret={list(witness[1])}")
    else:
        a = load_matrix(args.input)
        ok = audit.check_prop2(a, trials=args.trials, budget=_budget(args))
        _write(args.out, f"rank={gf.rank(a)} holds={str(ok).lower()}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_access_threshold(args) -> int:
    _write(args.out, _dump(acc.threshold(args.n, args.r, args.t).to_dict()))
    return EXIT_OK


def cmd_example(args) -> int:
    data = acc.EXAMPLE_ACCESS.to_dict() if args.name == "access" else mmsp.EXAMPLE_MMSP.to_dict()
    _write(args.out, _dump(data))
    return EXIT_OK


def _budget(args):
    return args.budget if args.budget is not None else audit.default_budget()


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=int, default=None, help="enumeration budget")

    parser = argparse.ArgumentParser(prog="spirkit", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("mmsp").add_subparsers(dest="verb", required=True)
    p = g.add_parser("verify", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--access", required=True)
    p.set_defaults(func=cmd_mmsp_verify)
    p = g.add_parser("vandermonde", parents=[common])
    for flag in ("--q", "--n", "--r", "--t"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--points", default=None, help="comma-separated evaluation points")
    p.set_defaults(func=cmd_mmsp_vandermonde)
    p = g.add_parser("search", parents=[common])
    p.add_argument("--access", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, default=1)
    p.add_argument("--y", type=int, default=1)
    p.add_argument("--max-z", type=int, required=True)
    p.set_defaults(func=cmd_mmsp_search)

    p = groups.add_parser("convert", parents=[common])
    p.add_argument("conversion", choices=("nss-to-mmsp", "mmsp-to-spir", "spir-to-nss", "project"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--f", type=int, default=2)
    p.set_defaults(func=cmd_convert)

    p = groups.add_parser("audit", parents=[common])
    p.add_argument("target", choices=("spir", "nss"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--access", required=True)
    p.set_defaults(func=cmd_audit)

    g = groups.add_parser("bound").add_subparsers(dest="verb", required=True)
    p = g.add_parser("delta", parents=[common])
    p.add_argument("--access", required=True)
    p.set_defaults(func=cmd_bound_delta)

    p = groups.add_parser("simulate", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--respond", required=True, help="e.g. 2,3")
    p.add_argument("--collude", default="")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--files", default=None, help="comma-separated file symbols (default random)")
    p.add_argument("--trials", type=int, default=0, help="run a seeded sweep instead of one session")
    p.set_defaults(func=cmd_simulate)

    p = groups.add_parser("check", parents=[common])
    p.add_argument("claim", choices=("theorem1", "lemma2", "lemma3", "prop2"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--access", default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(func=cmd_check)

    g = groups.add_parser("access").add_subparsers(dest="verb", required=True)
    p = g.add_parser("threshold", parents=[common])
    for flag in ("--n", "--r", "--t"):
        p.add_argument(flag, type=int, required=True)
    p.set_defaults(func=cmd_access_threshold)

    p = groups.add_parser("example", parents=[common])
    p.add_argument("name", choices=("access", "mmsp"))
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.group == "check" and args.claim == "theorem1" and (args.r is None or args.t is None):
        print("error: USAGE: check theorem1 needs --r and --t", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
    except (SpirkitError, InvariantViolation) as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
