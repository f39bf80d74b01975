#!/usr/bin/env python3
"""Plot altitude, flight mode, and the ground track from mission telemetry.

    soarsim run --scenario scenarios/field.json --seed 3 --out flight.jsonl
    python scripts/plot_flight.py flight.jsonl --out flight.png
"""

import argparse
import json
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("telemetry", help="JSONL telemetry from `soarsim run` or `paired`")
    parser.add_argument("--out", default="flight.png")
    args = parser.parse_args()

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install matplotlib", file=sys.stderr)
        return 1

    records = [json.loads(line) for line in open(args.telemetry)]
    t = [r["t"] / 60.0 for r in records]
    h = [r["h"] for r in records]
    modes = [r["mode"] for r in records]
    gx = [r["ground"][0] for r in records]
    gy = [r["ground"][1] for r in records]

    mode_colors = {"AUTO_CLIMB": "tab:red", "AUTO_GLIDE": "tab:blue", "THERMALLING": "tab:green"}
    fig, (ax_h, ax_xy) = plt.subplots(1, 2, figsize=(13, 5))

    start = 0
    for i in range(1, len(records) + 1):
        if i == len(records) or modes[i] != modes[start]:
            ax_h.plot(t[start:i], h[start:i], color=mode_colors[modes[start]], lw=1.2)
            ax_xy.plot(gx[start:i], gy[start:i], color=mode_colors[modes[start]], lw=0.8)
            start = i
    for mode, color in mode_colors.items():
        ax_h.plot([], [], color=color, label=mode)
    ax_h.set_xlabel("time, min")
    ax_h.set_ylabel("altitude, m")
    ax_h.legend(loc="lower left", fontsize=8)
    ax_h.grid(alpha=0.3)
    ax_xy.set_xlabel("east, m")
    ax_xy.set_ylabel("north, m")
    ax_xy.set_aspect("equal")
    ax_xy.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=130)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
