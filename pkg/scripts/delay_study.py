"""Mean local delay study: delay vs transmit probability (the U-shape),
the optimal transmit probability vs receiver distance, and the
successful transmission density.

Divergent delays are written as inf values.
"""

import argparse
import os

import numpy as np

from blinecox.curves import CurveTable
from blinecox.geometry import BlcpModel, BlpModel
from blinecox.metrics import (
    RadioParams,
    mean_local_delay,
    optimal_transmit_probability,
    successful_transmission_density,
)
from dataclasses import replace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--xi0", type=float, default=2.9858e8)
    ap.add_argument("--gamma", type=float, default=0.1)
    ap.add_argument("--n-p", type=int, default=25)
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    model = BlcpModel(BlpModel(n_b=10, radius=50.0), intensity=0.1)
    base = RadioParams(xi0=args.xi0, gamma=args.gamma)
    ps = np.linspace(1.0 / args.n_p, 1.0, args.n_p)

    series, xs, ys = [], [], []
    for r0 in (0.0, 25.0, 50.0):
        for p in ps:
            d = mean_local_delay(model, replace(base, p=float(p)), r0)
            series.append(f"delay r0={r0:g}")
            xs.append(float(p))
            ys.append(d)
        s = successful_transmission_density(model, replace(base, p=0.5), r0)
        print(f"r0={r0:g}: std(p=0.5)={s:.5g}", end="")
        try:
            pstar = optimal_transmit_probability(model, base, r0)
            print(f"  p*={pstar:.3f}")
        except ArithmeticError:
            print("  p*=divergent everywhere")

    table = CurveTable(
        series=series, x=np.asarray(xs), y=np.asarray(ys),
        metadata={"xi0": args.xi0, "gamma": args.gamma},
    )
    path = os.path.join(args.out_dir, "delay_vs_p.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(table.to_csv())
    print(path)


if __name__ == "__main__":
    main()
