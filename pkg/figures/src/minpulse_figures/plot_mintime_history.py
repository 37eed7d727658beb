"""Two-panel convergence plot of a `min-time` run: gate duration and peak
amplitude per outer iteration, with the acceptance amplitude band shaded."""
from __future__ import annotations

import argparse
import sys

from matplotlib import pyplot as plt

from .common import check_out_path, floats, load_columns, run_script


def render(in_path, out_path, bmax_ghz: float, delta_b_ghz: float) -> None:
    cols = load_columns(in_path, ["k", "T_ns", "cmax_ghz"])
    k = floats(cols["k"], "k")
    t = floats(cols["T_ns"], "T_ns")
    c = [v * 1e3 for v in floats(cols["cmax_ghz"], "cmax_ghz")]
    out = check_out_path(out_path)

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.0, 5.4), sharex=True)
    ax1.plot(k, t, "o-", color="tab:blue")
    ax1.set_ylabel("duration $T_k$ (ns)")
    ax2.plot(k, c, "s-", color="tab:orange")
    ax2.axhspan((bmax_ghz - delta_b_ghz) * 1e3, bmax_ghz * 1e3,
                color="tab:green", alpha=0.2, label="accepted band")
    ax2.set_ylabel(r"$c_\mathrm{max}/2\pi$ (MHz)")
    ax2.set_xlabel("outer iteration $k$")
    ax2.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def _worker(argv):
    parser = argparse.ArgumentParser(
        description="Duration and amplitude convergence of a min-time run")
    parser.add_argument("--in", dest="in_path", required=True,
                        help="history.csv from a min-time run")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image (.svg/.pdf/.eps)")
    parser.add_argument("--bmax-ghz", type=float, default=0.040)
    parser.add_argument("--delta-b-ghz", type=float, default=0.005)
    args = parser.parse_args(argv)
    render(args.in_path, args.out_path, args.bmax_ghz, args.delta_b_ghz)
    print(f"wrote {args.out_path}")


def main() -> None:
    sys.exit(run_script(_worker))


if __name__ == "__main__":
    main()
