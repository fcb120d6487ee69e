"""CSV emission and report rendering.

CSV files are the primary data products: one header row, numeric fields at
full precision (17 significant digits), byte-identical for identical config
and seed.  The ``report`` path additionally renders matplotlib figures next
to the delimited output.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def write_csv(path, fieldnames, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            if isinstance(row, dict):
                writer.writerow([fmt(row.get(k, "")) for k in fieldnames])
            else:
                writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _maybe_float(s):
    try:
        return float(s)
    except (TypeError, ValueError):
        return None


def _fig_path(outdir: Path, stem: str) -> Path:
    return outdir / f"fig_{stem}.png"


def _render_equilibrium(outdir: Path, rows) -> Path | None:
    ts = [_maybe_float(r["t"]) for r in rows]
    if not ts or any(t is None for t in ts):
        return None
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for col, style in (("a", "-"), ("b", "--"), ("a_inv", ":")):
        ys = [_maybe_float(r[col]) for r in rows]
        ax.loglog(ts, ys, style, label=col)
    ax.loglog(ts, ts, color="0.7", lw=0.8, label="t")
    ax.set_xlabel("t")
    ax.set_ylabel("boundary value")
    ax.legend()
    ax.set_title("equilibrium window boundaries")
    fig.tight_layout()
    path = _fig_path(outdir, "equilibrium")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def _render_grid(outdir: Path, rows) -> Path | None:
    ks = [int(r["k"]) for r in rows]
    etas = [_maybe_float(r["eta"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ks, etas, "o-")
    ax.set_xlabel("k")
    ax.set_ylabel("eta_k")
    ax.set_title("covering grid")
    fig.tight_layout()
    path = _fig_path(outdir, "grid")
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def _render_norms(outdir: Path, rows, stem: str) -> Path | None:
    labels = [f'{r.get("label", "?")}:{r.get("norm_kind", "")}' for r in rows]
    vals = [_maybe_float(r.get("value")) for r in rows]
    if not vals or any(v is None for v in vals):
        return None
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(vals)), 4))
    ax.bar(range(len(vals)), vals)
    ax.set_xticks(range(len(vals)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("norm value")
    ax.set_title(stem)
    fig.tight_layout()
    path = _fig_path(outdir, stem)
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def _render_generic(outdir: Path, rows, stem: str) -> Path | None:
    if not rows:
        return None
    cols = list(rows[0].keys())
    xcol = cols[0]
    ycols = [c for c in cols[1:] if _maybe_float(rows[0][c]) is not None]
    if not ycols:
        return None
    xraw = [_maybe_float(r[xcol]) for r in rows]
    xs = xraw if all(v is not None for v in xraw) else list(range(len(rows)))
    series = []
    for c in ycols[:6]:
        ys = [_maybe_float(r[c]) for r in rows]
        if not any(v is None for v in ys):
            series.append((c, ys))
    if not series:
        return None
    loglog = all(v > 0 for v in xs) and \
        all(v > 0 for _, ys in series for v in ys)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for c, ys in series:
        if loglog:
            ax.loglog(xs, ys, "o-", label=c, ms=3)
        else:
            ax.plot(xs, ys, "o-", label=c, ms=3)
    ax.set_xlabel(xcol)
    ax.legend(fontsize=7)
    ax.set_title(stem)
    fig.tight_layout()
    path = _fig_path(outdir, stem)
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_report(outdir) -> dict:
    """Aggregate the CSVs present in ``outdir`` into a summary plus figures."""
    outdir = Path(outdir)
    produced = {"figures": [], "summary": None}
    summary_rows = []

    for name, renderer in (("equilibrium", _render_equilibrium), ("grid", _render_grid)):
        path = outdir / f"{name}.csv"
        if path.exists():
            fig = renderer(outdir, read_csv(path))
            if fig:
                produced["figures"].append(fig)

    for stem in ("norms", "associate"):
        path = outdir / f"{stem}.csv"
        if path.exists():
            fig = _render_norms(outdir, read_csv(path), stem)
            if fig:
                produced["figures"].append(fig)

    for path in sorted(outdir.glob("verify_*.csv")):
        stem = path.stem
        if stem == "verify_summary":
            continue
        fig = _render_generic(outdir, read_csv(path), stem)
        if fig:
            produced["figures"].append(fig)

    for path in sorted(outdir.glob("construct_*.csv")):
        fig = _render_generic(outdir, read_csv(path), path.stem)
        if fig:
            produced["figures"].append(fig)

    const_path = outdir / "constants.csv"
    if const_path.exists():
        for r in read_csv(const_path):
            summary_rows.append({"source": r["suite"], "name": r["name"],
                                 "value": r["value"]})
    vs_path = outdir / "verify_summary.csv"
    if vs_path.exists():
        for r in read_csv(vs_path):
            summary_rows.append({"source": r["suite"], "name": "passed",
                                 "value": r["passed"]})
    if summary_rows:
        produced["summary"] = write_csv(outdir / "report_summary.csv",
                                        ["source", "name", "value"], summary_rows)
    return produced
