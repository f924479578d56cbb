"""Sweep the kernel bandwidth and neighborhood size on the swiss roll.

Two locality controls shape the embedding: the Gaussian bandwidth
epsilon and the optional union-kNN truncation N.  This script sweeps
both and reports, for each setting, how well the first diffusion
component tracks (a) the arc length along the roll and (b) the best
principal component.  Small epsilon unrolls the manifold; very large
epsilon degenerates the embedding toward PCA; a small N restores
locality even at huge epsilon.
"""

import argparse

import numpy as np
from scipy.stats import spearmanr

import diffmap_nre as dn


def psi1_diagnostics(data, arc, pca_scores, params):
    try:
        model, _ = dn.fit_diffusion_map(data, params, k_max=1)
    except dn.DisconnectedGraphError as exc:
        return None, str(exc)
    psi1 = model.psi[:, 1]
    rho = abs(spearmanr(psi1, arc).statistic)
    sim = max(
        abs(float(np.corrcoef(psi1, pca_scores[:, j])[0, 1]))
        for j in range(pca_scores.shape[1])
    )
    return (rho, sim), None


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    data = dn.make_swiss_roll(
        dn.SwissRollParams(n=args.n, noise_sigma=0.2, width=21.0, seed=args.seed)
    )
    arc = dn.swiss_roll_arc_length(data.intrinsic[:, 0])
    pca_scores = dn.pca_transform(dn.pca_fit(data, 3), data).coords

    print(f"swiss roll n={args.n}; |rho| = Spearman(psi_1, arc length),")
    print("pca sim = best |corr(psi_1, PC_j)| over the first three PCs")
    print()
    print("epsilon   N      |rho| arc   pca sim")
    for epsilon in (1.0, 5.0, 50.0, 1000.0):
        for n_neighbors in (None, 10):
            params = dn.KernelParams(
                epsilon=epsilon, n_neighbors=n_neighbors, alpha=0.5
            )
            result, failure = psi1_diagnostics(data, arc, pca_scores, params)
            label = "full" if n_neighbors is None else f"{n_neighbors:4d}"
            if result is None:
                print(f"{epsilon:7.1f}   {label}   graph disconnected ({failure})")
                continue
            rho, sim = result
            print(f"{epsilon:7.1f}   {label}   {rho:9.4f}   {sim:7.4f}")
    print()
    print("epsilon=5 unrolls the manifold; epsilon=1000 on the full graph")
    print("collapses onto a principal component; N=10 keeps the kernel")
    print("local and recovers the unrolling even at epsilon=1000.")


if __name__ == "__main__":
    main()
