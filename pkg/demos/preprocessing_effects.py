"""How column transforms change (or don't change) the embedding.

The kernel sees only Euclidean distances, so transforms that reweight
columns reshape the embedding.  Scaling the width column up by 10 makes
it the dominant direction and psi_1 switches from tracking arc length
to tracking width.  Duplicating the column is a much milder implicit
reweighting (8 noisy copies multiply its effective weight by only
sqrt(9) = 3), and coarse discretization perturbs distances by at most
the bin width.  Normalizations are harmless as long as the bandwidth is
rescaled with the squared data diameter.  Each row reports the Spearman
correlation of psi_1 against the roll's arc length and width.
"""

import numpy as np
from scipy.stats import spearmanr

import diffmap_nre as dn


def unroll_quality(data, arc, width, epsilon):
    model, _ = dn.fit_diffusion_map(
        data, dn.KernelParams(epsilon=epsilon, alpha=0.5), k_max=1
    )
    psi1 = model.psi[:, 1]
    return (
        abs(spearmanr(psi1, arc).statistic),
        abs(spearmanr(psi1, width).statistic),
    )


def main():
    data = dn.make_swiss_roll(
        dn.SwissRollParams(n=2000, noise_sigma=0.2, width=21.0, seed=0)
    )
    arc = dn.swiss_roll_arc_length(data.intrinsic[:, 0])
    width = data.intrinsic[:, 1]

    x = data.values[:, 0]
    variants = [
        ("raw roll", data, 5.0),
        ("scale y by 10", dn.scale_column(data, "y", 10.0), 5.0),
        ("duplicate y x8 (noisy)",
         dn.duplicate_column(data, "y", 8, noise_sigma=0.2, seed=1), 5.0),
        ("standardized", dn.standardize(data), 0.05),
        ("minmax normalized", dn.minmax_normalize(data), 0.005),
        ("discretize x to 25 levels",
         dn.discretize_column(data, "x", np.linspace(x.min(), x.max(), 25)), 5.0),
    ]
    print("transform                     epsilon   |rho| arc   |rho| width")
    for label, variant, epsilon in variants:
        rho_arc, rho_width = unroll_quality(variant, arc, width, epsilon)
        print(f"{label:28s}  {epsilon:7.3f}   {rho_arc:9.4f}   {rho_width:11.4f}")
    print()
    print("the x10 scaling flips psi_1 from the spiral to the width;")
    print("duplication and mild discretization barely move it; after a")
    print("normalization the same geometry returns once epsilon matches")
    print("the new (smaller) scale.")


if __name__ == "__main__":
    main()
