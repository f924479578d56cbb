"""Score growing component sets of the swiss roll embedding by decoder.

The normalized reconstruction error (NRE) of a component set is the
test mean squared error of a small neural decoder trained to map those
embedding columns back to the ambient coordinates, divided by the error
of the best constant predictor.  The consecutive curve scores the
nested sets (1), (1,2), ..., and shows which additions actually carry
new information: on the narrow roll the width direction lives in
component 5, and the pair {1, 5} alone reconstructs the data almost
perfectly; components 2-4 are redundant harmonics of component 1 whose
only contribution comes from small width admixtures picked up at finite
sample size.
"""

import argparse

import diffmap_nre as dn


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k-max", type=int, default=5)
    args = parser.parse_args()

    data = dn.make_swiss_roll(
        dn.SwissRollParams(n=args.n, noise_sigma=0.2, width=21.0, seed=args.seed)
    )
    model, _ = dn.fit_diffusion_map(
        data, dn.KernelParams(epsilon=5.0, alpha=0.5), k_max=max(args.k_max, 5)
    )
    config = dn.DecoderConfig()

    empty = dn.nre(model, data, (), config)
    print(f"empty set (constant decoder): nre = {empty.epsilon_k_normalized:.4f}")
    print(f"  (epsilon_0 = mean per-column test variance = {empty.epsilon_0:.4f})")
    print()

    curve = dn.nre_curve_consecutive(model, data, args.k_max, config)
    print("consecutive curve:")
    print("components        nre     test mse")
    for entry in curve.entries:
        label = ",".join(str(c) for c in entry.components)
        print(f"  ({label:12s})  {entry.nre:7.4f}  {entry.report.final_test_loss:9.4f}")
    print()

    pair = dn.nre(model, data, (1, 5), config)
    print(f"pair {{1,5}}: nre = {pair.epsilon_k_normalized:.4f}")
    print()
    print("reading the curve: component 1 (arc length) explains most of")
    print("the variance on its own; 2-4 are polynomial echoes of it, yet")
    print("the curve still creeps down across them because the fitted")
    print("eigenvectors carry percent-scale admixtures of the width that")
    print("the decoder learns to exploit; the width component proper")
    print("enters at 5 and the error collapses — the two-component set")
    print("{1,5} matches the full prefix (1..5) at a fraction of the size.")


if __name__ == "__main__":
    main()
