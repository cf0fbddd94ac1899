"""Command line: resolve, chart, massey, verify."""
from __future__ import annotations

import argparse
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from ..hopf import PRESENTATIONS, ceta, cofiber_h0, load_comodule, sphere
from ..resolve.chart import ExtChart, ExtClass
from ..resolve.engine import Resolution, TruncationError
from ..resolve.products import massey_triple, periodicity_apply
from ..trigrade import C0, D0, PH1, P, Plane, TriDegree, XI1_SQ, XI2, TAU2, h_degree, parse_degree
from .report import Report

ALGEBRAS = ["A", "A1", "A2", "A2-mod-xi1sq", "A2-mod-xi1sq-xi2"]
NAMED = {"c0": C0, "Ph1": PH1, "d0": D0, "P": P}
_H_RE = re.compile(r"^h(\d+)(?:\^(\d+))?$")


def threads() -> int:
    """Worker bound from MOTEXT_THREADS (0 or unset = one per CPU)."""
    raw = os.environ.get("MOTEXT_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("MOTEXT_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def parse_class(chart: ExtChart, text: str) -> ExtClass:
    """h<i>, h<i>^<k>, c0, Ph1, d0, P, or a degree (s,f,w) with an optional
    :index selecting a basis element; named classes must be unique in their cell."""
    text = text.strip()
    idx = None
    if ":" in text:
        text, i = text.rsplit(":", 1)
        idx = int(i)
    m = _H_RE.match(text)
    if m:
        d = h_degree(int(m.group(1))).scale(int(m.group(2) or 1))
    elif text in NAMED:
        d = NAMED[text]
    else:
        d = parse_degree(text)
    if not chart.in_window(d):
        raise TruncationError(f"{text} at {d} is outside the computed window")
    if idx is None:
        return chart.unique_class(d)
    n = chart.dim(d)
    if not 0 <= idx < n:
        raise ValueError(f"index {idx} out of range for cell {d} of dimension {n}")
    return chart.element(d, idx)


def _module(arg: str, p):
    if arg == "S":
        return sphere()
    if arg == "Ceta":
        return ceta()
    if arg == "Ch0":
        return cofiber_h0()
    with open(arg) as fh:
        return load_comodule(fh.read(), p, os.path.basename(arg))


def _vector(c: ExtClass) -> str:
    return "[" + ",".join(str((c.vector >> i) & 1) for i in range(max(c.vector.bit_length(), 1))) + "]"


# ------------------------------------------------------------- subcommands

def cmd_resolve(a) -> int:
    p = PRESENTATIONS[a.algebra]
    res = Resolution(p, _module(a.module, p), a.tmax, a.fmax)
    res.save(a.out)
    counts = res.generator_counts()
    print(f"resolved {a.module} over {a.algebra}: t<={a.tmax}, f<={a.fmax}, "
          f"{sum(counts.values()) if isinstance(counts, dict) else counts} generators -> {a.out}")
    return 0


def _load_chart(path) -> ExtChart:
    return ExtChart(Resolution.load(path))


def build_chart(what: str, chart: ExtChart, window=None, theta="P"):
    from ..towers import (attach_model, cofiber_h0_model, f0_groups, f01_groups, mod_h1_infty,
                          smash_h0k_groups, theta_cofiber_groups)
    if what == "ext":
        return chart
    F0 = f0_groups(chart, window=window)
    if what == "F0":
        return F0
    if what == "F01":
        return f01_groups(F0)
    if what.startswith("S-mod-h0k:"):
        k = int(what.split(":", 1)[1])
        return smash_h0k_groups(F0, k, window=window)
    if what == "theta-cofiber":
        res = chart.res
        ce = ExtChart(Resolution(res.p, cofiber_h0(), res.t_max, res.f_max))
        Y = smash_h0k_groups(F0, 1, window=window)
        bad = attach_model(Y, cofiber_h0_model(chart, ce, with_P=(theta == "P")))
        if bad:
            print(f"warning: two-cell model disagrees at {len(bad)} cells; using the LES parts",
                  file=sys.stderr)
        Z = mod_h1_infty(Y)
        return theta_cofiber_groups(Z, theta)
    raise ValueError(f"unknown chart {what}")


def cmd_chart(a) -> int:
    from .emit import emit_chart
    chart = _load_chart(a.input)
    window = tuple(int(x) for x in a.window.split(",")) if a.window else None
    c = build_chart(a.what, chart, window, a.theta)
    out = a.out or os.path.join(a.input, f"{a.what.replace(':', '_')}.{a.emit}")
    emit_chart(c, a.emit, out)
    print(out)
    return 0


def cmd_massey(a) -> int:
    if a.input:
        chart = _load_chart(a.input)
    else:
        chart = ExtChart(Resolution(PRESENTATIONS[a.algebra], sphere(), a.tmax, a.fmax))
    x = parse_class(chart, a.x)
    if a.P is not None:
        res = periodicity_apply(chart, a.P, x)
        label = f"P_{a.P}({a.x})"
    else:
        if a.a is None or a.b is None:
            raise SystemExit("massey needs --a and --b, or --P")
        res = massey_triple(chart, parse_class(chart, a.a), parse_class(chart, a.b), x)
        label = f"<{a.a},{a.b},{a.x}>"
    d = res.representative.degree
    print(f"{label} at ({d.s},{d.f},{d.w}): representative {_vector(res.representative)}"
          f" of cell dimension {chart.dim(d)}")
    if res.indeterminacy:
        print("indeterminacy basis: " + " ".join(_vector(c) for c in res.indeterminacy))
    else:
        print("indeterminacy: zero")
    return 0


# ------------------------------------------------------------- verify

def planes_report() -> Report:
    from .planes import slope_pipeline
    rep = Report("planes", "tau2, xi2, xi1^2 (nilpotent), anchor (3,3,5)")
    steps = [(TAU2, False), (XI2, False), (XI1_SQ, True)]
    got = slope_pipeline(steps, Plane(0, 0, 0), anchor=TriDegree(3, 3, 5))
    expected = [(Fraction(1, 6), 0, None), (Fraction(1, 5), 0, None), (Fraction(1, 5), 0, None),
                (Fraction(1, 5), 0, Fraction(12, 5))]
    for i, (p, e) in enumerate(zip(got, expected)):
        rep.checked += 1
        if (p.a, p.b, p.c) != e:
            rep.add(f"step {i + 1}", e, (p.a, p.b, p.c))
    return rep


def ceta_report(t_max: int, f_max: int, h0_torsion: bool = False) -> Report:
    """Vanishing of Ext_A(M2, C_eta) above f = s/2 + 3/2 with s > 0; with
    h0_torsion only the h0-torsion part of each cell is tested."""
    from ..hopf import A
    from .checks import check_vanishing, h0_torsion_view
    chart = ExtChart(Resolution(A, ceta(), t_max, f_max))
    src = h0_torsion_view(chart) if h0_torsion else chart
    return check_vanishing(src, Plane(Fraction(1, 2), 0, Fraction(3, 2)), True,
                           name="ceta-vanishing" + (":h0-torsion" if h0_torsion else ""))


def run_check(name: str, t_max: int, f_max: int) -> Report:
    from .checks import main_theorem_check
    from .figures import regression_figures
    if name == "planes":
        return planes_report()
    if name == "figures":
        return regression_figures()
    if name in ("ceta-vanishing", "ceta-vanishing:h0-torsion"):
        return ceta_report(t_max, f_max, h0_torsion=name.endswith("torsion"))
    m = re.match(r"^(massey-uniqueness|periodicity):(\d+)$", name)
    if m:
        top = main_theorem_check(int(m.group(2)), t_max, f_max)
        sub = top.subreports[0] if m.group(1) == "massey-uniqueness" else top.subreports[1]
        rep = Report(f"{name}", top.window, list(sub.violations), list(sub.skipped), sub.checked)
        rep.notes = list(top.notes)
        if m.group(1) == "periodicity":
            rep.subreports = [top.subreports[2]]
        return rep
    raise ValueError(f"unknown check {name}")


def _run_check_safe(args):
    name, t_max, f_max = args
    try:
        return run_check(name, t_max, f_max)
    except (ValueError, TruncationError) as exc:
        rep = Report(name, f"t<={t_max}, f<{f_max}")
        rep.add("-", "check runs", str(exc))
        return rep


def cmd_verify(a) -> int:
    jobs = [(c, a.tmax, a.fmax) for c in a.check]
    n = min(threads(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            reports = list(ex.map(_run_check_safe, jobs))
    else:
        reports = [_run_check_safe(j) for j in jobs]
    for r in reports:
        print(r.summary())
    return 0 if all(r.passed for r in reports) else 1


# ------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motext", description="Trigraded motivic Ext engine")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("resolve", help="compute and save a minimal resolution")
    r.add_argument("--algebra", choices=ALGEBRAS, required=True)
    r.add_argument("--module", default="S", help="S, Ceta, Ch0 or a comodule file")
    r.add_argument("--tmax", type=int, required=True)
    r.add_argument("--fmax", type=int, required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(fn=cmd_resolve)

    c = sub.add_parser("chart", help="emit a chart from a saved resolution")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--emit", choices=["tsv", "svg"], required=True)
    c.add_argument("--what", default="ext", help="ext, F0, F01, S-mod-h0k:<k> or theta-cofiber")
    c.add_argument("--theta", default="P", help="operator for theta-cofiber")
    c.add_argument("--window", help="s_lo,s_hi,f_lo,f_hi for derived charts")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_chart)

    m = sub.add_parser("massey", help="Massey products <a,b,x> and P_r(x)")
    m.add_argument("--a")
    m.add_argument("--b")
    m.add_argument("--x", required=True)
    m.add_argument("--P", type=int)
    m.add_argument("--in", dest="input", help="saved resolution (default: compute one)")
    m.add_argument("--algebra", choices=ALGEBRAS, default="A")
    m.add_argument("--tmax", type=int, default=24)
    m.add_argument("--fmax", type=int, default=12)
    m.set_defaults(fn=cmd_massey)

    v = sub.add_parser("verify", help="run checks; exit status 0 iff all pass")
    v.add_argument("--check", action="append", required=True,
                   help="ceta-vanishing[:h0-torsion], massey-uniqueness:<r>, periodicity:<r>, figures, planes")
    v.add_argument("--tmax", type=int, default=40)
    v.add_argument("--fmax", type=int, default=20)
    v.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.fn(a)
    except (TruncationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
