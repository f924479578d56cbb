"""Diffusion time rescales the embedding; the spectrum says how fast.

The coordinates at time t are lambda_i^t * psi_i, so raising t only
shrinks each column by a power of its eigenvalue — the shape of the
embedding cannot change, only its aspect ratio.  The useful question is
how many components stay above a relative threshold delta as t grows,
which is what ``spectrum_threshold`` counts.
"""

import numpy as np

import diffmap_nre as dn


def main():
    data = dn.make_swiss_roll(
        dn.SwissRollParams(n=2000, noise_sigma=0.2, width=21.0, seed=0)
    )
    model, _ = dn.fit_diffusion_map(
        data, dn.KernelParams(epsilon=5.0, alpha=0.5), k_max=1999
    )

    comps = (1, 2, 3)
    base = dn.embed(model, 1, comps).coords
    lam = model.eigenvalues[list(comps)]
    print("exact t-scaling: max |embed(t) - embed(1) * lambda^(t-1)|")
    for t in (0, 2, 10):
        coords = dn.embed(model, t, comps).coords
        gap = np.abs(coords - base * lam ** (t - 1)).max()
        print(f"  t={t:2d}: {gap:.3e}")
    print()

    print("retained components s(delta, t) out of 1999:")
    print("delta     t=1     t=10    t=100   t=1000")
    for delta in (0.5, 0.1, 0.01):
        counts = [dn.spectrum_threshold(model, delta, t) for t in (1, 10, 100, 1000)]
        print(f"{delta:5.2f}  " + "".join(f"{c:7d} " for c in counts))
    print()
    print("larger t damps the higher components geometrically, so the")
    print("count collapses toward the slowest nontrivial mode; t is a")
    print("soft truncation knob, not a new source of structure.")


if __name__ == "__main__":
    main()
