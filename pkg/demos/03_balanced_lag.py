import numpy as np

from mwde import BasisSpec, QuadratureGrid, cascade, estimate, get_density, l2_distance, load_filter, reconstruct

# a balanced multifilter regroups the taps of a scalar filter
print(load_filter("bal-db5"))
db5 = cascade(load_filter("db5"))
bal = cascade(load_filter("bal-db5"))

# its components are sqrt(2) phi(2x) and sqrt(2) phi(2x - 1)
t = np.linspace(0, 5, 11)
print(np.abs(bal.evaluate(t)[0] - np.sqrt(2) * db5.evaluate(2 * t)[0]).max())
print(np.abs(bal.evaluate(t)[1] - np.sqrt(2) * db5.evaluate(2 * t - 1)[0]).max())

# so the multiwavelet estimate at level j equals the scalar one at j + 1
d = get_density("skewed-bimodal")
x = d.sample(10000, seed=0)
grid = QuadratureGrid(-4, 4)
for j in range(-2, 3):
    m = reconstruct(estimate(BasisSpec(bal, j, d.domain), x), grid)
    w = reconstruct(estimate(BasisSpec(db5, j + 1, d.domain), x), grid)
    print(j, l2_distance(m, w, grid) / l2_distance(w, 0 * w, grid))
