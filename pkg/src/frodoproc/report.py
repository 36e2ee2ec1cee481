"""Comparison tables and matplotlib figures for simulator runs."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simulator import TALLY_ORDER, CycleReport, InFlight  # noqa: E402
from .targets import TARGETS_VERSION, Check  # noqa: E402


def checks_text(checks: Sequence[Check]) -> str:
    lines = ["check\tvalue\ttarget\tdelta\tresult"]
    for c in checks:
        if c.detail == "bool":
            delta, val, tgt = "-", "yes" if c.value else "no", "yes"
        elif c.detail == "percent":
            delta = f"{c.value - c.target:+.2f}pp"
            val, tgt = f"{c.value:.2f}", f"{c.target:.2f}"
        elif c.detail == "ms":
            delta = f"{100 * c.delta:+.2f}%"
            val, tgt = f"{c.value:.4f}", f"{c.target:.4f}"
        else:
            delta = f"{100 * c.delta:+.2f}%"
            val, tgt = f"{c.value:.0f}", f"{c.target:.0f}"
        lines.append(f"{c.name}\t{val}\t{tgt}\t{delta}\t{'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def document(reports: Sequence[CycleReport], checks: Sequence[Check]) -> str:
    """Reports separated by ``---`` lines, followed by the comparison table."""
    parts = [r.to_text() for r in reports]
    parts.append(f"# comparison against reference figures (targets v{TARGETS_VERSION})\n" + checks_text(checks))
    return "---\n".join(parts)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}.png")


def plot_opcodes(reports: Sequence[CycleReport], out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4))
    labels = [f"{r.level}\n{r.phase}\n{'on' if r.overlap else 'off'}" for r in reports]
    bottom = [0.0] * len(reports)
    for oc in TALLY_ORDER + ["dispatch"]:
        vals = [(r.dispatch if oc == "dispatch" else r.cycles.get(oc, 0)) / 1e3 for r in reports]
        if any(vals):
            ax.bar(labels, vals, bottom=bottom, label=oc)
            bottom = [b + v for b, v in zip(bottom, vals)]
    ax.plot(labels, [r.total / 1e3 for r in reports], "k_", markersize=30, label="elapsed")
    ax.set_ylabel("kCC")
    ax.set_title("busy cycles per opcode vs elapsed")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out


def plot_timeline(trace: Iterable[InFlight], out: Path, window: int = 2000) -> Path:
    """Gantt chart of the first ``window`` cycles, one lane per opcode."""
    trace = [f for f in trace if f.start < window]
    lanes = [oc for oc in TALLY_ORDER if any(f.ins.opcode.value == oc for f in trace)]
    fig, ax = plt.subplots(figsize=(10, 0.5 + 0.45 * max(1, len(lanes))))
    for f in trace:
        y = lanes.index(f.ins.opcode.value)
        ax.broken_barh([(f.start, min(f.end, window) - f.start)], (y - 0.35, 0.7))
    ax.set_yticks(range(len(lanes)), lanes)
    ax.set_xlim(0, window)
    ax.set_xlabel("cycle")
    ax.set_title("instruction timeline")
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out


def plot_totals(pairs: dict[tuple[int, str], tuple[int, int]], targets: dict[tuple[int, str], tuple[float, float, float]],
                out: Path) -> Path:
    keys = sorted(pairs)
    fig, ax = plt.subplots(figsize=(9, 4))
    x = range(len(keys))
    ax.bar([i - 0.2 for i in x], [pairs[k][0] / 1e3 for k in keys], width=0.4, label="model, overlap on")
    ax.bar([i + 0.2 for i in x], [pairs[k][1] / 1e3 for k in keys], width=0.4, label="model, overlap off")
    ax.scatter([i - 0.2 for i in x], [targets[k][0] for k in keys], color="k", marker="x", zorder=3, label="reference")
    ax.scatter([i + 0.2 for i in x], [targets[k][1] for k in keys], color="k", marker="x", zorder=3)
    ax.set_xticks(list(x), [f"{n}\n{ph}" for n, ph in keys])
    ax.set_ylabel("kCC")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out


def write(path, reports: Sequence[CycleReport], checks: Sequence[Check], trace: Iterable[InFlight] | None = None,
          totals: dict | None = None, targets: dict | None = None) -> list[Path]:
    """Write the delimited report at ``path`` and its figures next to it."""
    path = Path(path)
    path.write_text(document(reports, checks))
    written = [path, plot_opcodes(reports, _sibling(path, "opcodes"))]
    if trace is not None:
        written.append(plot_timeline(trace, _sibling(path, "timeline")))
    if totals and targets:
        written.append(plot_totals(totals, targets, _sibling(path, "totals")))
    return written
