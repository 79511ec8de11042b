"""How much work does each target share cost?

Sweeps the requested top fraction and prints what share of clusters had to
be checked, next to the SI histogram of the dataset and per-metric timings.
"""

from hisim.benchmark import cluster_si_values, si_histogram, sweep, time_kernels
from hisim.pipeline import PipelineConfig
from hisim.synthetic import GeneratorSpec, generate_synthetic

sources, targets = generate_synthetic(GeneratorSpec(n_targets=800), seed=2)
cfg = PipelineConfig(sample_size=160, class_size=64, seed=2)

counts = si_histogram(cluster_si_values(cfg, sources, targets))
print("SI histogram over ten bins of [0, 1]:")
for k, n in enumerate(counts):
    print(f"  {k / 10:.1f}-{(k + 1) / 10:.1f} {'#' * (int(n) // 10)} {int(n)}")

print()
print("   p  checked  checked/targeted  recall")
for row in sweep(cfg, sources, targets, [0.1, 0.3, 0.5]).rows:
    print(f"{row.p:4.1f}  {row.checked_fraction:7.3f}  {row.ratio:16.2f}  {row.achieved_recall:6.3f}")

print()
print("per-pair cost of each metric (microseconds):")
for t in time_kernels(100, repeats=3, seed=0):
    print(f"  {t.metric:14s} {t.mean_ns / 1e3:8.1f} +- {t.std_ns / 1e3:.1f}")
