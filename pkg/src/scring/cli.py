"""Command-line interface."""
from __future__ import annotations

import functools
import json
import sys as _sys
from pathlib import Path

import click

from .chart import (UndecidedVirtual, annotate, compute_chart, f_char,
                    filtration_index, minimal_covering)
from .config import DEFAULT_CAPS
from .families import PRESETS, dehn_reduce
from .oracle import bounded_membership, verify_certificate
from .polynomials import parse_polynomial
from .presentation import PresentationError, load_system, preset_text
from .relations import (INFINITY, NotInM, check_compatibility, check_isolation,
                        check_small_cancellation)
from .rewrite import greedy_branches, greedy_reduce, parse_certificate
from .words import parse_word


def _num(x):
    return "inf" if x == INFINITY else int(x)


def emit(ctx_json: bool, doc: dict, text: str) -> None:
    if ctx_json:
        click.echo(json.dumps({"schema": 1, **doc}, sort_keys=True))
    else:
        click.echo(text)


def common(f):
    @click.argument("system")
    @click.option("--tau", type=int, default=None, help="Override tau (explicit files).")
    @click.option("--depth", type=click.IntRange(1), default=None, help="Virtual-member search depth.")
    @click.option("--len-bound", type=click.IntRange(1), default=None, help="Length bound for bounded checks.")
    @click.option("--max-steps", type=click.IntRange(1), default=None, help="Greedy step budget.")
    @click.option("--n-cap", type=click.IntRange(1), default=None, help="Highest relator power in path enumeration.")
    @click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
    @click.option("--seed", type=int, default=0, show_default=True)
    @click.option("--branches", type=click.Choice(["first", "all"]), default="first", show_default=True)
    @click.option("--auto-reduce", is_flag=True, help="Freely reduce input words.")
    @functools.wraps(f)
    def wrapper(system, tau, depth, len_bound, max_steps, n_cap, as_json, seed,
                branches, auto_reduce, **kw):
        caps = DEFAULT_CAPS
        if depth is not None:
            caps = caps.with_(virtual_depth=depth)
        if n_cap is not None:
            caps = caps.with_(n_cap=n_cap)
        cfg = dict(len_bound=len_bound, max_steps=max_steps, as_json=as_json, seed=seed,
                   branches=branches, auto_reduce=auto_reduce)
        try:
            sys = load_system(system, caps, auto_reduce, tau)
            code = f(sys, cfg, **kw)
        except (PresentationError, NotInM, UndecidedVirtual, ValueError, KeyError) as e:
            click.echo(f"error: {e}", err=True)
            _sys.exit(2)
        _sys.exit(code or 0)
    return wrapper


def _word(sys, text, cfg):
    return parse_word(text, sys.alphabet, cfg["auto_reduce"])


def _poly(sys, text, cfg):
    return parse_polynomial(text, sys.alphabet, sys.field, cfg["auto_reduce"], sys.names)


@click.group()
def main():
    """Small cancellation rings: charts, measures and greedy ideal membership."""


@main.command("check-axioms")
@common
def check_axioms(sys, cfg):
    fam = sys.family
    if hasattr(fam, "relations"):
        longest = max((r.max_length() for r in fam.relations), default=1)
    else:
        longest = sum(len(l) for l in fam.graph.loops)
    bound = cfg["len_bound"] or 2 * longest
    reports = [check_compatibility(sys, bound, seed=cfg["seed"]),
               check_small_cancellation(sys, 200, bound, seed=cfg["seed"]),
               check_isolation(sys, bound, 2)]
    ok = all(r.ok for r in reports)
    emit(cfg["as_json"],
         {"command": "check-axioms", "ok": ok,
          "reports": [{"name": r.name, "ok": r.ok, "conclusive": r.conclusive,
                       "bound": r.bound, "checked": r.checked, "witness": r.witness,
                       "detail": r.detail} for r in reports]},
         "\n".join(r.line() for r in reports))
    return 0 if ok else 1


@main.command("small-piece")
@common
@click.argument("word")
def small_piece(sys, cfg, word):
    u = _word(sys, word, cfg)
    ans = sys.is_small_piece(u)
    emit(cfg["as_json"], {"command": "small-piece", "word": word, "small_piece": ans},
         "small piece" if ans else "not a small piece")
    return 0


@main.command("lambda")
@common
@click.argument("word")
def lambda_cmd(sys, cfg, word):
    u = _word(sys, word, cfg)
    value = sys.lambda_(u)
    emit(cfg["as_json"], {"command": "lambda", "word": word, "lambda": _num(value),
                          "mode": sys.measure_mode}, str(_num(value)))
    return 0


def _chart_doc(sys, U, cfg):
    ch = annotate(compute_chart(U, sys), sys)
    rows = [{"start": o.start, "length": o.length, "word": sys.format(o.word),
             "lambda": _num(o.lam), "member": o.member, "virtual": o.virtual.value}
            for o in ch.occurrences]
    nu = minimal_covering(U, ch)
    try:
        f = f_char(U, sys)
        fdoc = {"nu": f.nu, "v": f.v, "filtration_index": filtration_index(f)}
    except UndecidedVirtual:
        fdoc = {"nu": nu, "v": None, "filtration_index": None}
    return rows, fdoc


@main.command("chart")
@common
@click.argument("word")
def chart_cmd(sys, cfg, word):
    U = _word(sys, word, cfg)
    rows, fdoc = _chart_doc(sys, U, cfg)
    lines = [f"{r['start']:>5} {r['length']:>5}  lambda={r['lambda']}  "
             f"member={'yes' if r['member'] else 'no'}  virtual={r['virtual']}  {r['word']}"
             for r in rows]
    if not rows:
        lines.append("empty chart")
    lines.append(f"nu={fdoc['nu']} v={fdoc['v']} f=({fdoc['nu']}, {fdoc['v']}) "
                 f"index={fdoc['filtration_index']}")
    emit(cfg["as_json"], {"command": "chart", "word": word, "chart": rows, **fdoc},
         "\n".join(lines))
    return 0


@main.command("fchar")
@common
@click.argument("word")
def fchar_cmd(sys, cfg, word):
    U = _word(sys, word, cfg)
    f = f_char(U, sys)
    n = filtration_index(f)
    emit(cfg["as_json"], {"command": "fchar", "word": word, "nu": f.nu, "v": f.v,
                          "filtration_index": n}, f"f=({f.nu}, {f.v}) index={n}")
    return 0


@main.command("reduce")
@common
@click.argument("polynomial")
@click.option("--cert", "cert_path", type=click.Path(dir_okay=False), default=None,
              help="Where to write the certificate (default: standard output).")
def reduce_cmd(sys, cfg, polynomial, cert_path):
    p = _poly(sys, polynomial, cfg)
    if cfg["branches"] == "all":
        leaves = greedy_branches(p, sys, cfg["max_steps"])
        ok = all(r.trace.reached_zero for r in leaves)
        outcomes = [r.trace.outcome for r in leaves]
        emit(cfg["as_json"], {"command": "reduce", "branches": outcomes, "member": ok},
             "\n".join(f"branch {i}: {o}" for i, o in enumerate(outcomes)))
        return 0 if ok else 1
    red = greedy_reduce(p, sys, cfg["max_steps"])
    tr = red.trace
    status = {"zero": f"member: reached 0 in {len(tr.steps)} steps",
              "stuck": "stuck (proved): no virtual member in the highest monomial",
              "stuck-within-bounds": "stuck within bounds: no qualifying relation found",
              "exhausted": "step budget exhausted"}[tr.outcome]
    doc = {"command": "reduce", "outcome": tr.outcome, "steps": len(tr.steps)}
    text = status
    if tr.final is not None and not tr.final.is_zero():
        doc["final"] = sys.format_poly(tr.final)
    if red.certificate is not None:
        body = red.certificate.format(sys.alphabet, sys.field)
        if cert_path:
            Path(cert_path).write_text(body, encoding="utf-8")
            doc["certificate_path"] = cert_path
        else:
            doc["certificate"] = body
            text += "\n" + body.rstrip("\n")
    emit(cfg["as_json"], doc, text)
    return 0 if tr.outcome == "zero" else 1


@main.command("verify-cert")
@common
@click.argument("polynomial")
@click.argument("cert_path", type=click.Path(exists=True, dir_okay=False))
def verify_cert(sys, cfg, polynomial, cert_path):
    p = _poly(sys, polynomial, cfg)
    cert = parse_certificate(Path(cert_path).read_text(encoding="utf-8"), sys.alphabet, sys.field)
    ok = verify_certificate(p, cert, sys)
    emit(cfg["as_json"], {"command": "verify-cert", "valid": ok}, "valid" if ok else "invalid")
    return 0 if ok else 1


@main.command("dehn")
@common
@click.argument("word")
def dehn_cmd(sys, cfg, word):
    pres = getattr(sys, "presentation", None)
    if pres is None:
        raise ValueError("dehn needs a group family")
    out = dehn_reduce(_word(sys, word, cfg), pres)
    emit(cfg["as_json"], {"command": "dehn", "result": sys.format(out), "trivial": not out},
         sys.format(out))
    return 0 if not out else 1


@main.command("oracle-member")
@common
@click.argument("polynomial")
@click.option("--context", type=click.IntRange(0), default=1, show_default=True,
              help="Longest left/right context word.")
def oracle_member(sys, cfg, polynomial, context):
    p = _poly(sys, polynomial, cfg)
    bound = cfg["len_bound"] or max([len(w) for w in p.terms] + [1]) + 2 * context
    res = bounded_membership(p, sys, bound, context)
    doc = {"command": "oracle-member", "member": res.member, "columns": res.columns}
    text = "member" if res.member else "unknown"
    if res.certificate is not None:
        body = res.certificate.format(sys.alphabet, sys.field)
        doc["certificate"] = body
        text += "\n" + body.rstrip("\n")
    emit(cfg["as_json"], doc, text)
    return 0 if res.member else 1


@main.command("demo")
@click.argument("name", required=False, type=click.Choice(list(PRESETS)))
def demo(name):
    """Print a preset as a presentation file, or list the presets."""
    if name is None:
        for p in PRESETS:
            click.echo(p)
        return
    click.echo(preset_text(name), nl=False)


if __name__ == "__main__":
    main()
