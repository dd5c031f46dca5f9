"""Command-line front end.

Every subcommand prints one deterministic report (JSON by default).  Exit
status: 0 when the question was answered, 2 when the budget ran out first,
1 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import analytics, engine, zoo
from .grid import InputError, format_pattern, parse_pattern
from .properties import REFUTER_NAMES, refuter_from_spec
from .streams import Outcome, co_language, extension_cap

SCHEMA = "effshift.report/1"
EXIT_OK, EXIT_ERROR, EXIT_EXHAUSTED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _frac(x: Fraction | None) -> str | None:
    if x is None:
        return None
    return f"{x.numerator}/{x.denominator}"


def _params(text: str | None) -> dict:
    if not text:
        return {}
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"--params is not valid JSON: {e}") from None
    if not isinstance(d, dict):
        raise InputError("--params must be a JSON object")
    return d


def _budget(b: int) -> int:
    if b < 1:
        raise InputError("budget must be >= 1")
    return b


# ---------------------------------------------------------------------------
# Subcommands: each returns (report, rows, exit code)
# ---------------------------------------------------------------------------

def cmd_zoo(a):
    if a.shift:
        z = zoo.from_name(a.shift)
        row = {"name": z.label, "alphabet": " ".join(map(str, z.alphabet)), "tags": ",".join(sorted(z.tags)),
               "finite": z.presentation.finite, "oracle": z.word_oracle is not None}
        return {"shift": row}, [row], EXIT_OK
    rows = [{"name": n} for n in zoo.REGISTRY_HELP]
    return {"shifts": [r["name"] for r in rows]}, rows, EXIT_OK


def _decide_one(shift: str, prop: str, params: dict, pattern: str, budget: int, trace: bool) -> dict:
    z = zoo.from_name(shift)
    F = z.presentation
    ref = refuter_from_spec(prop, params, F.alphabet, F.group)
    p = parse_pattern(pattern, F.alphabet, F.group)
    v = engine.decide_pattern(F, ref, p, budget)
    out = {"shift": shift, "refuter": {"name": prop, "params": params}, "pattern": format_pattern(p),
           **v.to_json(with_trace=trace)}
    return out


def cmd_decide(a):
    params = _params(a.params)
    budget = _budget(a.budget)
    jobs = [(a.shift, a.property, params, pat, budget, a.trace) for pat in a.pattern]
    if a.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            results = list(ex.map(_decide_star, jobs))
    else:
        results = [_decide_one(*j) for j in jobs]
    code = EXIT_EXHAUSTED if any(r["verdict"] == Outcome.EXHAUSTED.value for r in results) else EXIT_OK
    rows = [{"pattern": r["pattern"], "verdict": r["verdict"], "budgetUsed": r["budgetUsed"]} for r in results]
    report = results[0] if len(results) == 1 else {"runs": results}
    report["contract"] = engine.MINIMALITY_CONTRACT
    return report, rows, code


def _decide_star(args):
    return _decide_one(*args)


def cmd_enumerate(a):
    z = zoo.from_name(a.shift)
    F = z.presentation
    ref = refuter_from_spec(a.property, _params(a.params), F.alphabet, F.group)
    res = engine.enumerate_language(F, ref, _budget(a.budget), limit=a.limit)
    report = {"shift": a.shift, "refuter": ref.spec(), "members": [format_pattern(p) for p in res.members],
              "nonmembers": [format_pattern(p) for p in res.nonmembers],
              "unresolved": [format_pattern(p) for p in res.unresolved()], "budgetUsed": res.spent,
              "contract": engine.MINIMALITY_CONTRACT}
    rows = [{"pattern": format_pattern(p), "verdict": res.verdicts[i].outcome.value}
            for i, p in enumerate(res.candidates)]
    code = EXIT_EXHAUSTED if res.unresolved() else EXIT_OK
    return report, rows, code


def cmd_complexity(a):
    z = zoo.from_name(a.shift)
    rows = [{"n": n, "count": c} for n, c in analytics.complexity_table(z, a.max_n)]
    return {"shift": a.shift, "rows": rows}, rows, EXIT_OK


def cmd_entropy(a):
    z = zoo.from_name(a.shift)
    N = analytics.complexity_count(z, a.n)
    iv = analytics.entropy_interval_si(N, a.n, a.gluing)
    lo, hi = iv.rational_bounds(a.denominator)
    dlo, dhi = iv.decimal()
    row = {"n": a.n, "N": N, "k": a.gluing, "lower": _frac(lo), "upper": _frac(hi),
           "lowerDecimal": round(dlo, 6), "upperDecimal": round(dhi, 6)}
    return {"shift": a.shift, "interval": row, "note": "bounds rounded outward to the stated denominator"}, [row], EXIT_OK


def cmd_periods(a):
    z = zoo.from_name(a.shift)
    out = {}
    if a.method in ("brute", "both"):
        out["brute"] = list(analytics.per_vector_brute(z, a.i_max).counts)
    if a.method in ("transfer", "both"):
        out["transfer"] = list(analytics.per_vector_transfer(z, a.i_max).counts)
    rows = [{"i": i, **{k: v[i - 1] for k, v in out.items()}} for i in range(1, a.i_max + 1)]
    report = {"shift": a.shift, **out}
    if a.method == "both":
        report["agree"] = out["brute"] == out["transfer"]
    return report, rows, EXIT_OK


def cmd_slope(a):
    z = zoo.from_name(a.shift)
    m, (lo, hi) = analytics.recover_slope_max(z, a.n)
    row = {"n": a.n, "maxOnes": m, "lower": _frac(lo), "upper": _frac(hi)}
    return {"shift": a.shift, **row}, [row], EXIT_OK


def cmd_window(a):
    alpha = Fraction(a.alpha)
    z = zoo.sturmian_window(alpha, alpha + Fraction(1, 2))
    if a.source == "presentation":
        wb = analytics.recover_window(z.presentation.patterns(), a.budget)
    else:
        wb = analytics.recover_window(co_language(z.presentation), a.budget)
    row = {"consumed": wb.consumed, "lower": _frac(wb.lo), "upper": _frac(wb.hi),
           "width": _frac(wb.width)}
    return {"window": f"[{alpha}, {alpha}+1/2]", "source": a.source, **row}, [row], EXIT_OK


def cmd_product(a):
    X, Y = zoo.from_name(a.left), zoo.from_name(a.right)
    P = zoo.product_shift(X, Y)
    side_alpha = X.alphabet if a.side == "left" else Y.alphabet
    proj = engine.product_co_language(co_language(P.presentation), a.side, X.alphabet, Y.alphabet)
    proj.step(_budget(a.budget))
    words = sorted({format_pattern(p) for p in proj.emitted
                    if p.is_word() and len(p.items) <= a.max_len}, key=lambda s: (len(s), s))
    rows = [{"pattern": w} for w in words]
    return {"left": a.left, "right": a.right, "side": a.side, "alphabet": list(map(str, side_alpha)),
            "emitted": words, "budgetUsed": proj.spent}, rows, EXIT_OK


def cmd_union(a):
    X, Y = zoo.from_name(a.x), zoo.from_name(a.y)
    if X.alphabet != Y.alphabet:
        raise InputError("union needs a common alphabet")
    N = engine.disjoint_separation_radius(X.accepts, Y.accepts, X.alphabet, a.n_max)
    if isinstance(N, engine.NotSeparated):
        report = {"x": a.x, "y": a.y, "separated": False, "nMax": a.n_max,
                  "note": "a common pattern exists on ball(nMax); nothing is claimed beyond the searched range"}
        return report, [{"separated": False, "nMax": a.n_max}], EXIT_OK
    U = zoo.union_shift(X, Y)
    pred = engine.separating_predicate(X.accepts, Y.accepts, N)
    stream = engine.union_co_language(co_language(U.presentation), pred, alphabet=X.alphabet)
    stream.step(_budget(a.budget))
    words = sorted({format_pattern(p) for p in stream.emitted
                    if p.is_word() and len(p.items) <= a.max_len}, key=lambda s: (len(s), s))
    rows = [{"pattern": w} for w in words]
    return {"x": a.x, "y": a.y, "separated": True, "radius": N, "emitted": words,
            "budgetUsed": stream.spent}, rows, EXIT_OK


def cmd_invariance(a):
    z = zoo.from_name(a.shift)
    viol = analytics.invariance_check(z.accepts, a.n, z.alphabet, z.group)
    rows = [{"pattern": format_pattern(p), "generator": str(g)} for p, g in viol]
    return {"shift": a.shift, "n": a.n, "violations": rows}, rows, EXIT_OK


def cmd_replay(a):
    try:
        with open(a.certificate) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read certificate: {e}") from None
    runs = doc.get("runs", [doc])
    rows = []
    ok_all = True
    for r in runs:
        try:
            z = zoo.from_name(r["shift"])
            F = z.presentation
            ref = refuter_from_spec(r["refuter"]["name"], r["refuter"].get("params"), F.alphabet, F.group)
            cert = r["certificate"]
            if cert is None:
                raise InputError("no certificate (exhausted run)")
            ok = engine.replay_decision(F, ref, cert)
            expect = {"colanguage": "no", "refutation": "yes"}.get(cert.get("kind"))
            ok = ok and r.get("verdict") == expect and cert.get("pattern") == r.get("pattern")
        except (KeyError, TypeError) as e:
            raise InputError(f"malformed certificate: {e}") from None
        ok_all &= ok
        rows.append({"pattern": r.get("pattern"), "verdict": r.get("verdict"), "verified": ok})
    return {"verified": ok_all, "runs": rows}, rows, EXIT_OK if ok_all else EXIT_ERROR


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="effshift", description="Language decisions and invariants for effectively closed shifts.")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, budget=None):
        sp.add_argument("--format", choices=("json", "csv", "table"), default=argparse.SUPPRESS)
        if budget is not None:
            sp.add_argument("--budget", type=int, default=budget)

    s = sub.add_parser("zoo", help="list or describe registry shifts")
    s.add_argument("--shift")
    common(s)

    for name in ("decide", "enumerate"):
        s = sub.add_parser(name, help="decide patterns" if name == "decide" else "split candidates into L and L^c")
        s.add_argument("--shift", required=True)
        s.add_argument("--property", required=True, help="|".join(REFUTER_NAMES))
        s.add_argument("--params", help="JSON object of refuter parameters")
        if name == "decide":
            s.add_argument("--pattern", action="append", required=True)
            s.add_argument("--trace", action="store_true")
            s.add_argument("--jobs", type=int, default=1)
        else:
            s.add_argument("--limit", type=int, default=62)
        common(s, budget=1_000_000)

    s = sub.add_parser("complexity")
    s.add_argument("--shift", required=True)
    s.add_argument("--max-n", type=int, default=10)
    common(s)

    s = sub.add_parser("entropy")
    s.add_argument("--shift", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--gluing", type=int, default=0)
    s.add_argument("--denominator", type=int, default=1 << 20)
    common(s)

    s = sub.add_parser("periods")
    s.add_argument("--shift", required=True)
    s.add_argument("--i-max", type=int, default=8)
    s.add_argument("--method", choices=("brute", "transfer", "both"), default="brute")
    common(s)

    s = sub.add_parser("slope")
    s.add_argument("--shift", required=True)
    s.add_argument("--n", type=int, required=True)
    common(s)

    s = sub.add_parser("window")
    s.add_argument("--alpha", required=True)
    s.add_argument("--source", choices=("presentation", "colanguage"), default="presentation")
    common(s, budget=20_000)

    s = sub.add_parser("product")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--side", choices=("left", "right"), default="left")
    s.add_argument("--max-len", type=int, default=4)
    common(s, budget=200_000)

    s = sub.add_parser("union")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--max-len", type=int, default=5)
    common(s, budget=200_000)

    s = sub.add_parser("invariance")
    s.add_argument("--shift", required=True)
    s.add_argument("--n", type=int, default=4)
    common(s)

    s = sub.add_parser("replay")
    s.add_argument("certificate")
    common(s)
    return p


COMMANDS = {"zoo": cmd_zoo, "decide": cmd_decide, "enumerate": cmd_enumerate, "complexity": cmd_complexity,
            "entropy": cmd_entropy, "periods": cmd_periods, "slope": cmd_slope, "window": cmd_window,
            "product": cmd_product, "union": cmd_union, "invariance": cmd_invariance, "replay": cmd_replay}


def _render(report: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"schema": SCHEMA, **report}, sort_keys=True, indent=2)
    if not rows:
        return ""
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    cells = [[str(c) for c in cols]] + [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells)


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        extension_cap()  # validate the environment override early
        report, rows, code = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (InputError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if "contract" in report and args.format != "json":
        print(f"contract: {report['contract']}", file=sys.stderr)
    text = _render(report, rows, args.format)
    if text:
        print(text, file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
