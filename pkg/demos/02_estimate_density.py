import numpy as np

from mwde import BasisSpec, QuadratureGrid, cascade, estimate, get_density, ise, load_filter, normalize, reconstruct
from mwde.estimator import export_estimate

claw = get_density("claw")
x = claw.sample(10000, seed=1)
grid = QuadratureGrid(-4, 4)  # 4096 points, trapezoid weights
truth = claw.truncated_pdf(grid.x)

# same sample, one multiwavelet and one scalar wavelet basis
for name in ["stt", "db5"]:
    table = cascade(load_filter(name))
    for level in [1, 2, 3]:
        spec = BasisSpec(table, level, claw.domain)
        est = estimate(spec, x)
        raw = reconstruct(est, grid)
        fixed = normalize(est, grid)  # nonnegative, unit mass on the grid
        print(name, level, spec.coefficient_count,
              round(ise(raw, truth, grid) * 1e3, 4), round(ise(fixed.values, truth, grid) * 1e3, 4))

# coefficients are plain arrays: alpha[n] belongs to translate k_min + n
print(est.coefficients.alpha.shape, est.coefficients.k_min)
print(fixed.normalization)

# detail coefficients at extra levels are optional
detailed = estimate(BasisSpec(cascade(load_filter("stt")), 1, claw.domain), x, detail_levels=[1, 2])
print(sorted(detailed.coefficients.beta), np.round(ise(reconstruct(detailed, grid), truth, grid) * 1e3, 4))

export_estimate(fixed, "claw_db5.csv")  # writes claw_db5.csv and claw_db5.json
