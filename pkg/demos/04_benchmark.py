from mwde.bench import ExperimentConfig, best_per_density, run_benchmark, write_results, write_summary

# a reduced sweep; ExperimentConfig() alone is the full 5 x 34 x 6 grid
config = ExperimentConfig(
    densities=["normal", "bimodal"],
    families=["db4", "coif3", "sym6", "stt", "dghm", "bal-db4"],
    levels=[-1, 2],
    sample_size=10000,
    seed=0,
)
results = run_benchmark(config)
print(len(results))
print(results[0])

best = best_per_density(results)
for density, slots in best.items():
    for cls, r in slots.items():
        print(density, cls, r.family, r.level, r.coefficient_count, f"{r.ise * 1e3:.3g}e-3")

write_results(results, "bench_results.csv")
write_summary(best, "bench_summary.csv")

# same thing from the shell:
#   mwde benchmark --config cfg.json --out bench_results.csv --summary bench_summary.csv
