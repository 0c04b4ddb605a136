import numpy as np

from mwde import cascade, list_filters, load_filter, orthogonality_residual, orthonormality_residual

# every registered family, scalar ones first
print(list_filters())

# a multifilter is a stack of r x r recursion matrices
dghm = load_filter("dghm")
print(dghm)
print(dghm.lowpass.shape)  # (length, r, r)
print(orthogonality_residual(dghm.lowpass, dghm.highpass))  # ~1e-16

# cascade: iterate the refinement equation on a dyadic grid (spacing 2^-10)
table = cascade(dghm, depth=10)
print(table.iterations, table.refinement_residual)
print(orthonormality_residual(table))  # discrete <phi_i, phi_j(. - k)> defect

# off-grid values come from natural cubic splines through the samples
print(table.evaluate([0.25, 1.0, 1.75]))
print(table.evaluate(2.5))  # outside the support -> zeros

# db2 has closed-form values at the integers
db2 = cascade(load_filter("db2"))
print(db2.evaluate([1.0, 2.0])[0], (1 + np.sqrt(3)) / 2, (1 - np.sqrt(3)) / 2)

# plot-ready dump: x, phi_1..phi_r, psi_1..psi_r
table.to_csv("dghm_table.csv")
