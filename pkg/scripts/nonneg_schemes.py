"""Compare the four AE-NMF non-negativity schemes on the two-signature example.

    python3 scripts/nonneg_schemes.py --max-iters 50000
"""

import argparse

from cvxsig import FitConfig, NonNegScheme, aenmf_fit, cnmf_fit, match_signatures
from cvxsig.sim import paper_example_spec, simulate_poisson


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-iters", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    v = simulate_poisson(paper_example_spec(args.seed)).matrix
    base = FitConfig(k=2, seed=args.seed, max_iters=args.max_iters)
    ref = cnmf_fit(v, base)
    print(f"C-NMF reference loss {ref.final_loss:.6f}")
    print("scheme   loss       iters    acs_vs_cnmf")
    for scheme in NonNegScheme:
        fit = aenmf_fit(v, FitConfig(k=2, seed=args.seed, max_iters=args.max_iters,
                                     nonneg_scheme=scheme))
        ac = match_signatures(fit.h, ref.h).acs
        print(f"{scheme.value:7s}  {fit.final_loss:.6f}  {fit.iters_run:7d}  {ac:.6f}")


if __name__ == "__main__":
    main()
