"""Principal residues of Cantor grills against the base residue.

The distance zeta of C x [0,1]^d is the base zeta shifted by d plus a part
holomorphic right of D + d - 1, so the residue at D + d should equal the
residue of the base at D.  The grill side is fitted numerically from the
sliced tube function.
"""
import argparse
import math

from fractal_zeta.merom import cantor_model, residue_fit
from fractal_zeta.sets import make_cantor, make_grill
from fractal_zeta.tubes import tube_model
from fractal_zeta.zeta import ZetaEvalConfig, distance_zeta


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--a", type=float, default=1 / 3)
    ap.add_argument("--dmax", type=int, default=1, help="d = 2 slices in two dimensions and takes many minutes")
    ap.add_argument("--orders", type=int, nargs="+", default=[0], help="lattice indices k (slow for k != 0)")
    args = ap.parse_args()

    m, a = args.m, args.a
    C = make_cantor(m, a)
    delta = (1 - m * a) / (2 * (m - 1))
    base = cantor_model(m, a, delta)
    D = base.D
    p = 2 * math.pi / math.log(1 / a)
    cfg = ZetaEvalConfig(delta)
    print(f"{'d':>2} {'k':>3} {'base residue':>32} {'grill fit':>32} {'abs diff':>9}")
    for d in range(1, args.dmax + 1):
        tube = tube_model(make_grill(C, d))
        for k in args.orders:
            w = complex(D, k * p)
            fit = residue_fit(lambda s: distance_zeta(tube, s + d, cfg), w, radius=0.05, levels=5)
            ref = base.residue(w)
            print(f"{d:>2} {k:>3} {ref:>32.10f} {fit.value:>32.10f} {abs(fit.value - ref):>9.1e}")


if __name__ == "__main__":
    main()
