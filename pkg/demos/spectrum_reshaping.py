"""What a filter does to the spectrum.

The maximum-degree matrix of a geometric network has eigenvalues bunched near
1. A degree-4 minimax filter keeps the consensus eigenvalue at 1 and pushes
the rest toward zero.
"""
import numpy as np

from polyconsensus import (WeightScheme, apply_to_spectrum, eig_sym, generate_rgg,
                           matrix_polynomial, optimal_filter_static)

W = WeightScheme("max-degree").build(generate_rgg(50, seed=0))
sol = optimal_filter_static(W, 4)
before = eig_sym(W).eigenvalues
after = np.sort(apply_to_spectrum(sol.filter, before))[::-1]

print("coefficients:", np.array2string(sol.coeffs, precision=2))
print(" i   before    after")
for i in list(range(6)) + [25, 49]:
    print(f"{i:2d}  {before[i]: .4f}  {after[i]: .4f}")

dense = np.sort(eig_sym(matrix_polynomial(sol.filter, W)).eigenvalues)[::-1]
print(f"dense p(W) agrees to {np.abs(dense - after).max():.1e}")
print(f"second largest magnitude: {np.abs(before[1:]).max():.4f} -> {sol.s_star:.4f}")
