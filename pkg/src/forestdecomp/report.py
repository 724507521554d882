"""Render descent figures from a solver trace.

The trace is the tab-separated move log; this module writes a summary
table next to PNG plots of the residue descent, so a run can be inspected
without replaying it.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _parse_rho(field: str):
    if field == "-":
        return []
    out = []
    for part in field.split(","):
        size, count = part.split(":")
        out.append((int(size), int(count)))
    return out


def parse_trace(text: str):
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        kind, rho_b, rho_a, sig_b, sig_a = line.split("\t")
        rows.append({
            "kind": kind,
            "rho_before": _parse_rho(rho_b),
            "rho_after": _parse_rho(rho_a),
            "sigma_before": [] if sig_b == "-" else [int(x) for x in sig_b.split(",")],
            "sigma_after": [] if sig_a == "-" else [int(x) for x in sig_a.split(",")],
        })
    return rows


def render_trace_report(trace_path: str, out_dir: str) -> list[str]:
    with open(trace_path, "r", encoding="utf-8") as fh:
        rows = parse_trace(fh.read())
    os.makedirs(out_dir, exist_ok=True)
    written = []

    summary_path = os.path.join(out_dir, "summary.tsv")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("move\tkind\tlargest_before\tlargest_after\t"
                 "oversize_before\toversize_after\tsigma_len\n")
        for i, row in enumerate(rows):
            lb = max((s for s, _ in row["rho_before"]), default=0)
            la = max((s for s, _ in row["rho_after"]), default=0)
            ob = sum(c for _, c in row["rho_before"])
            oa = sum(c for _, c in row["rho_after"])
            fh.write(f"{i}\t{row['kind']}\t{lb}\t{la}\t{ob}\t{oa}\t"
                     f"{len(row['sigma_after'])}\n")
    written.append(summary_path)

    xs = list(range(len(rows)))
    largest = [max((s for s, _ in r["rho_before"]), default=0) for r in rows]
    largest.append(max((s for s, _ in rows[-1]["rho_after"]), default=0) if rows else 0)
    count = [sum(c for _, c in r["rho_before"]) for r in rows]
    count.append(sum(c for _, c in rows[-1]["rho_after"]) if rows else 0)

    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    axes[0].step(range(len(largest)), largest, where="post")
    axes[0].set_ylabel("largest oversize size")
    axes[1].step(range(len(count)), count, where="post", color="tab:red")
    axes[1].set_ylabel("oversize components")
    axes[1].set_xlabel("move")
    fig.suptitle("residue descent")
    fig.tight_layout()
    descent_path = os.path.join(out_dir, "descent.png")
    fig.savefig(descent_path, dpi=120)
    plt.close(fig)
    written.append(descent_path)

    kinds = {}
    for r in rows:
        kinds[r["kind"]] = kinds.get(r["kind"], 0) + 1
    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = sorted(kinds)
    ax.bar(names, [kinds[n] for n in names], color="tab:blue")
    ax.set_ylabel("moves")
    fig.tight_layout()
    moves_path = os.path.join(out_dir, "moves.png")
    fig.savefig(moves_path, dpi=120)
    plt.close(fig)
    written.append(moves_path)
    return written
