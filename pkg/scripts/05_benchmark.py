"""
The benchmark tables
====================

Every method on every row, noiseless and with noise std 0.01 averaged over
20 seeds. Same as ``specbayes benchmark``.
"""

# %%
from specbayes.benchmark import BenchmarkConfig, format_tables, run_benchmark

tables = run_benchmark(BenchmarkConfig(seeds=20, sigmas=(0.0, 0.01)))
print(format_tables(tables))
