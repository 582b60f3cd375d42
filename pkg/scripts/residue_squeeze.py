"""Residue at D against the lower and upper Minkowski contents.

For a few generalized Cantor sets the numeric residue of the distance
zeta function at D is fitted from values to the right of the pole and
placed between (1-D) M_* and (1-D) M^*.
"""
import argparse

from fractal_zeta.merom import cantor_model, residue_fit
from fractal_zeta.sets import make_cantor
from fractal_zeta.tubes import cantor_contents, minkowski_contents_estimate, tube_model
from fractal_zeta.zeta import ZetaEvalConfig, distance_zeta


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=float, default=0.05)
    ap.add_argument("--levels", type=int, default=6)
    args = ap.parse_args()

    cases = [(2, 1 / 3), (2, 1 / 4), (3, 1 / 5), (3, 0.3), (4, 0.1), (5, 0.15)]
    print(f"{'m':>2} {'a':>7} {'D':>7} {'(1-D)M_*':>10} {'residue':>10} {'(1-D)M^*':>10} {'fit-closed':>10} {'spread':>9}")
    for m, a in cases:
        C = make_cantor(m, a)
        D = C.dim
        delta = (1 - m * a) / (2 * (m - 1))
        tube = tube_model(C)
        cfg = ZetaEvalConfig(delta)
        fit = residue_fit(lambda s: distance_zeta(tube, s, cfg), D, radius=args.radius, levels=args.levels)
        closed = cantor_model(m, a, delta).residue(D).real
        lo, hi = cantor_contents(m, a)
        est = minkowski_contents_estimate(tube, D, 1e-8, 1e-6)
        print(
            f"{m:>2} {a:>7.4f} {D:>7.4f} {(1 - D) * lo:>10.6f} {fit.value.real:>10.6f} {(1 - D) * hi:>10.6f} "
            f"{abs(fit.value.real - closed):>10.1e} {(1 - D) * est.residual_spread:>9.1e}"
        )


if __name__ == "__main__":
    main()
