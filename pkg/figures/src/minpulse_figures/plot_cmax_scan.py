"""Log-log plot of peak drive amplitude vs gate duration from a `cmax-scan`
history.csv, with a fitted power law and a 1/T guide line."""
from __future__ import annotations

import argparse
import sys

import numpy as np
from matplotlib import pyplot as plt

from .common import check_out_path, floats, load_columns, run_script


def fit_exponent(durations, cmax) -> tuple[float, float]:
    """Least-squares power-law fit c_max = A * T^p; returns (p, A)."""
    p, log_a = np.polyfit(np.log(durations), np.log(cmax), 1)
    return float(p), float(np.exp(log_a))


def render(in_path, out_path) -> float:
    cols = load_columns(in_path, ["T_ns", "cmax_ghz"])
    t = np.array(floats(cols["T_ns"], "T_ns"))
    c = np.array(floats(cols["cmax_ghz"], "cmax_ghz"))
    out = check_out_path(out_path)

    exponent, amplitude = fit_exponent(t, c)
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    ax.loglog(t, c * 1e3, "o", color="tab:blue", label="optimized pulses")
    t_line = np.linspace(t.min(), t.max(), 200)
    ax.loglog(t_line, amplitude * t_line ** exponent * 1e3, "-",
              color="tab:blue", alpha=0.6,
              label=f"fit: $T^{{{exponent:.2f}}}$")
    ref = c[0] * t[0] / t_line
    ax.loglog(t_line, ref * 1e3, "--", color="gray", label="$1/T$ guide")
    ax.set_xlabel("gate duration $T$ (ns)")
    ax.set_ylabel(r"$c_\mathrm{max}/2\pi$ (MHz)")
    ax.annotate(f"fitted exponent: {exponent:.2f}", xy=(0.05, 0.05),
                xycoords="axes fraction")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return exponent


def _worker(argv):
    parser = argparse.ArgumentParser(
        description="Peak amplitude vs duration (log-log) with power-law fit")
    parser.add_argument("--in", dest="in_path", required=True,
                        help="history.csv from a cmax-scan run")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image (.svg/.pdf/.eps)")
    args = parser.parse_args(argv)
    exponent = render(args.in_path, args.out_path)
    print(f"wrote {args.out_path} (fitted exponent {exponent:.3f})")


def main() -> None:
    sys.exit(run_script(_worker))


if __name__ == "__main__":
    main()
