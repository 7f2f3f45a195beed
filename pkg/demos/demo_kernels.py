"""Tour of the kernel layer: point kernels, Gram matrices, and the
measure-level Gaussian built on squared MMD.

Run:  python3 demos/demo_kernels.py
"""

import numpy as np

from probdense import (
    EmpiricalMeasure,
    GaussianRBF,
    MeasureGaussian,
    WendlandC2,
    eval_kernel,
    eval_measure_kernel,
    gram_matrix,
    injectivity_probe,
    mmd_squared,
    sup_kernel_norm,
)


def main():
    rng = np.random.default_rng(0)

    gauss = GaussianRBF(gamma=0.5)
    wend = WendlandC2(support_radius=0.5)
    print("point kernels at a few separations:")
    print(f"  {'dist':>6}  {'gaussian':>10}  {'wendland':>10}")
    for dist in (0.0, 0.25, 0.5, 1.0):
        kg = eval_kernel(gauss, [0.0], [dist])
        kw = eval_kernel(wend, [0.0], [dist])
        print(f"  {dist:6.2f}  {kg:10.6f}  {kw:10.6f}")
    print("  (the Wendland kernel cuts off exactly at its support radius)")

    X = rng.uniform(0.0, 1.0, (40, 2))
    K = gram_matrix(gauss, X)
    print(f"\nGram matrix on 40 random points in the unit square:")
    print(f"  symmetric: {np.array_equal(K, K.T)}")
    print(f"  sup norm sup_x k(x, x): {sup_kernel_norm(gauss, X)}")
    print(f"  smallest eigenvalue: {injectivity_probe(gauss, X):.3e}")

    atoms_p = rng.normal(0.0, 1.0, (60, 1))
    atoms_q = rng.normal(0.4, 1.0, (80, 1))
    P = EmpiricalMeasure(atoms_p, np.full(60, 1 / 60))
    Q = EmpiricalMeasure(atoms_q, np.full(80, 1 / 80))
    base = GaussianRBF(1.0)
    print(f"\nsquared MMD between two empirical measures (means 0.0 vs 0.4):")
    print(f"  mmd^2(P, Q) = {mmd_squared(base, P, Q):.6f}")
    print(f"  mmd^2(P, P) = {mmd_squared(base, P, P)}   (identical inputs give exact zero)")

    mk = MeasureGaussian(base, gamma=1.0)
    print(f"\nmeasure-level Gaussian kernel:")
    print(f"  k(P, Q) = {eval_measure_kernel(mk, P, Q):.6f}")
    print(f"  k(P, P) = {eval_measure_kernel(mk, P, P)}   (unit diagonal by construction)")


if __name__ == "__main__":
    main()
