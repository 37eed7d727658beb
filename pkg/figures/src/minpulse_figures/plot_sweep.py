"""Fidelity statistics vs gate duration from a constrained `sweep`
history.csv: median with a min-max band over the restarts."""
from __future__ import annotations

import argparse
import sys
from collections import defaultdict

import numpy as np
from matplotlib import pyplot as plt

from .common import check_out_path, floats, load_columns, run_script


def aggregate(durations, infidelities):
    """Group per duration; returns sorted (T, min, median, max) arrays of
    fidelity = 1 - infidelity."""
    groups = defaultdict(list)
    for t, infid in zip(durations, infidelities):
        groups[t].append(1.0 - infid)
    ts = sorted(groups)
    lo = np.array([min(groups[t]) for t in ts])
    med = np.array([float(np.median(groups[t])) for t in ts])
    hi = np.array([max(groups[t]) for t in ts])
    return np.array(ts), lo, med, hi


def render(in_path, out_path) -> None:
    cols = load_columns(in_path, ["T_ns", "infidelity"])
    t = floats(cols["T_ns"], "T_ns")
    infid = floats(cols["infidelity"], "infidelity")
    out = check_out_path(out_path)

    ts, lo, med, hi = aggregate(t, infid)
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    ax.fill_between(ts, lo, hi, alpha=0.25, color="tab:blue",
                    label="min-max over restarts")
    ax.plot(ts, med, "o-", color="tab:blue", label="median")
    ax.axhline(0.999, color="gray", linestyle="--", linewidth=1,
               label="99.9% target")
    ax.set_xlabel("gate duration $T$ (ns)")
    ax.set_ylabel("gate fidelity")
    ax.legend(frameon=False, loc="lower right")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def _worker(argv):
    parser = argparse.ArgumentParser(
        description="Fidelity statistics vs duration from a sweep run")
    parser.add_argument("--in", dest="in_path", required=True,
                        help="history.csv from a sweep run")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image (.svg/.pdf/.eps)")
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path)
    print(f"wrote {args.out_path}")


def main() -> None:
    sys.exit(run_script(_worker))


if __name__ == "__main__":
    main()
