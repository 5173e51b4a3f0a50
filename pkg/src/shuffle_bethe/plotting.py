"""PNG summaries of a verification report (matplotlib, headless)."""

from __future__ import annotations

import os
from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PASS_COLOR = "#3a7d44"
FAIL_COLOR = "#b23a48"
PROBE_COLOR = "#8a8a8a"


def _by_anchor(checks):
    groups: "OrderedDict[str, dict]" = OrderedDict()
    for c in checks:
        g = groups.setdefault(c["anchor"], {"passed": 0, "failed": 0, "probe_failed": 0, "trials": 0})
        g["trials"] += c["trials"]
        if c.get("role", "verdict") != "verdict":
            if not c["passed"]:
                g["probe_failed"] += 1
            else:
                g["passed"] += 1
        elif c["passed"]:
            g["passed"] += 1
        else:
            g["failed"] += 1
    return groups


def plot_verdicts(report: dict, path: str) -> str:
    """Horizontal stacked bars: checks per anchor, split by outcome."""
    groups = _by_anchor(report["checks"])
    names = list(groups)
    fig, ax = plt.subplots(figsize=(8, 0.35 * max(len(names), 4) + 1.2))
    ys = range(len(names))
    left = [0] * len(names)
    for key, color, label in (("passed", PASS_COLOR, "passed"), ("failed", FAIL_COLOR, "failed"),
                              ("probe_failed", PROBE_COLOR, "discrepancy probe")):
        vals = [groups[n][key] for n in names]
        ax.barh(ys, vals, left=left, color=color, label=label)
        left = [a + b for a, b in zip(left, vals)]
    ax.set_yticks(list(ys))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("checks")
    ax.legend(loc="lower right", fontsize=8, frameon=False)
    s = report["summary"]
    ax.set_title(f"{s['passed']}/{s['total']} verdicts passed", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_trials(report: dict, path: str) -> str:
    """Exact trials spent per anchor (log scale)."""
    groups = _by_anchor(report["checks"])
    names = list(groups)
    fig, ax = plt.subplots(figsize=(8, 0.35 * max(len(names), 4) + 1.2))
    ax.barh(range(len(names)), [max(groups[n]["trials"], 1) for n in names], color="#4a6fa5")
    ax.set_xscale("log")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("trials (exact evaluations)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_dims(K: int, values: list, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(range(len(values)), values, marker="o", color="#4a6fa5")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel(f"dim R_{{{K},N}}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report_figures(report: dict, directory: str, stem: str = "report") -> list[str]:
    os.makedirs(directory, exist_ok=True)
    return [
        plot_verdicts(report, os.path.join(directory, f"{stem}_verdicts.png")),
        plot_trials(report, os.path.join(directory, f"{stem}_trials.png")),
    ]
