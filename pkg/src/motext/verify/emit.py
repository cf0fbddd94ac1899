"""TSV and SVG output for Ext charts and tower charts."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from ..resolve.chart import ExtChart
from ..towers import TowerChart, Uncomputed
from ..trigrade import TriDegree

EXT_HEADER = ["s", "f", "w", "dim", "tau", "h0", "h1", "h2"]
TOWER_HEADER = ["s", "f", "w", "dim", "ker_part", "coker_part", "tower_marker"]
MARKER_COLOURS = {"h0": "blue", "h1": "hotpink"}


def _rank(chart: ExtChart, op, d: TriDegree) -> str:
    try:
        r = chart.operator_rank(op, d)
    except ValueError:
        r = None
    return "NA" if r is None else str(r)


def ext_rows(chart: ExtChart) -> list:
    cells = sorted(chart.nonzero_cells(), key=lambda d: (d.s, d.f, -d.w))
    rows = []
    for d in cells:
        ranks = [_rank(chart, op, d) for op in ("tau", 0, 1, 2)]
        rows.append([d.s, d.f, d.w, chart.dim(d)] + ranks)
    return rows


def chart_rows(chart) -> tuple:
    if isinstance(chart, ExtChart):
        return EXT_HEADER, ext_rows(chart)
    if isinstance(chart, TowerChart):
        return TOWER_HEADER, [list(r) for r in chart.tsv_rows()]
    raise TypeError(f"cannot emit {type(chart).__name__}")


def _write_tsv(chart, path):
    header, rows = chart_rows(chart)
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for r in rows:
            fh.write("\t".join(str(x) for x in r) + "\n")


# ------------------------------------------------------------- svg

def chart_graph(chart) -> dict:
    """Dots, h0/h1 lines and tower arrows in (s, f) coordinates."""
    if isinstance(chart, TowerChart):
        dots = sorted(chart.figure_dots())
        torsion = sorted(chart.nonzero_positions() - set(dots))
        lines = {}
        for op in ("h0", "h1"):
            try:
                lines[op] = sorted(ln for ln in chart.lines(op) if ln[0] in set(dots) | set(torsion))
            except (Uncomputed, ValueError, KeyError):
                lines[op] = []
        arrows = []
        for m in chart.markers:
            a, b = m.cells(2)[0], m.cells(2)[1]
            arrows.append(((a.s, a.f), (b.s, b.f), m.direction))
        return {"dots": dots, "torsion": torsion, "lines": lines, "arrows": arrows}
    if isinstance(chart, ExtChart):
        pos = {}
        for d in chart.nonzero_cells():
            pos.setdefault((d.s, d.f), []).append(d)
        dots = sorted(p for p in pos if chart.free_rank(*p))
        torsion = sorted(p for p in pos if p not in set(dots))
        lines = {"h0": set(), "h1": set()}
        for p, ds in pos.items():
            for op, name in ((0, "h0"), (1, "h1")):
                for d in ds:
                    t = chart.operator_target(op, d)
                    if not chart.in_window(t):
                        continue
                    if any(chart.operator_matrix(op, d)):
                        lines[name].add((p, (t.s, t.f)))
                        break
        return {"dots": dots, "torsion": torsion,
                "lines": {k: sorted(v) for k, v in lines.items()}, "arrows": []}
    raise TypeError(f"cannot draw {type(chart).__name__}")


def graph_to_svg(g: dict, unit: int = 24, title: str = "") -> ET.Element:
    pts = list(g["dots"]) + list(g["torsion"])
    for ln in g["lines"].values():
        for a, b in ln:
            pts += [a, b]
    for a, b, _ in g["arrows"]:
        pts += [a, b]
    if pts:
        s_lo = min(p[0] for p in pts) - 1
        s_hi = max(p[0] for p in pts) + 1
        f_lo = min(p[1] for p in pts) - 1
        f_hi = max(p[1] for p in pts) + 1
    else:
        s_lo, s_hi, f_lo, f_hi = 0, 1, 0, 1
    width = (s_hi - s_lo) * unit
    height = (f_hi - f_lo) * unit

    def xy(p):
        return (p[0] - s_lo) * unit, (f_hi - p[1]) * unit

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width),
                     height=str(height), viewBox=f"0 0 {width} {height}")
    if title:
        ET.SubElement(svg, "title").text = title
    defs = ET.SubElement(svg, "defs")
    for name, col in MARKER_COLOURS.items():
        mk = ET.SubElement(defs, "marker", id=f"head-{name}", markerWidth="6", markerHeight="6",
                           refX="5", refY="3", orient="auto")
        ET.SubElement(mk, "path", d="M0,0 L6,3 L0,6 z", fill=col)
    # axes
    if s_lo <= 0 <= s_hi:
        x, _ = xy((0, 0))
        ET.SubElement(svg, "line", x1=str(x), y1="0", x2=str(x), y2=str(height), stroke="#bbb")
    if f_lo <= 0 <= f_hi:
        _, y = xy((0, 0))
        ET.SubElement(svg, "line", x1="0", y1=str(y), x2=str(width), y2=str(y), stroke="#bbb")
    for op, ln in g["lines"].items():
        for a, b in ln:
            (x1, y1), (x2, y2) = xy(a), xy(b)
            ET.SubElement(svg, "line", {"class": op, "data-from": f"{a[0]},{a[1]}",
                                        "data-to": f"{b[0]},{b[1]}", "x1": str(x1), "y1": str(y1),
                                        "x2": str(x2), "y2": str(y2), "stroke": "black",
                                        "stroke-width": "2"})
    for a, b, direction in g["arrows"]:
        (x1, y1), (x2, y2) = xy(a), xy(b)
        col = MARKER_COLOURS.get(direction, "red")
        ET.SubElement(svg, "line", {"class": f"tower {direction}", "data-from": f"{a[0]},{a[1]}",
                                    "data-to": f"{b[0]},{b[1]}", "x1": str(x1), "y1": str(y1),
                                    "x2": str(x2), "y2": str(y2), "stroke": col,
                                    "stroke-width": "3", "marker-end": f"url(#head-{direction})"})
    for p in g["dots"]:
        x, y = xy(p)
        ET.SubElement(svg, "circle", {"class": "dot", "data-s": str(p[0]), "data-f": str(p[1]),
                                      "cx": str(x), "cy": str(y), "r": str(unit // 6),
                                      "fill": "black"})
    for p in g["torsion"]:
        x, y = xy(p)
        ET.SubElement(svg, "circle", {"class": "torsion", "data-s": str(p[0]), "data-f": str(p[1]),
                                      "cx": str(x), "cy": str(y), "r": str(unit // 8),
                                      "fill": "white", "stroke": "black"})
    return svg


def read_svg_graph(path) -> dict:
    """Recover dots, lines and arrows from an SVG written by emit_chart."""
    ns = "{http://www.w3.org/2000/svg}"
    root = ET.parse(path).getroot()
    out = {"dots": set(), "torsion": set(), "lines": {"h0": set(), "h1": set()}, "arrows": set()}

    def pt(text):
        a, b = text.split(",")
        return int(a), int(b)
    for el in root.iter():
        tag = el.tag.replace(ns, "")
        cls = el.get("class", "")
        if tag == "circle" and cls in ("dot", "torsion"):
            out["dots" if cls == "dot" else "torsion"].add((int(el.get("data-s")), int(el.get("data-f"))))
        elif tag == "line" and cls in ("h0", "h1"):
            out["lines"][cls].add((pt(el.get("data-from")), pt(el.get("data-to"))))
        elif tag == "line" and cls.startswith("tower"):
            out["arrows"].add((pt(el.get("data-from")), pt(el.get("data-to")), cls.split()[1]))
    return out


def emit_chart(chart, fmt: str, path) -> str:
    """Write chart as TSV or SVG to path; returns the path."""
    if fmt == "tsv":
        _write_tsv(chart, path)
    elif fmt == "svg":
        svg = graph_to_svg(chart_graph(chart), title=getattr(chart, "name", "Ext"))
        ET.ElementTree(svg).write(path, encoding="unicode", xml_declaration=False)
    else:
        raise ValueError(f"unknown format {fmt}")
    return str(path)
