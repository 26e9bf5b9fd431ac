"""
Preprocessing grows with the document, delay does not
=====================================================

Generate documents of growing size with emails planted at a fixed
density, then compare preprocessing work and the largest gap between
two outputs.  Costs are logical step counts, not seconds.
"""

import sys

from spanrun.bench import linear_fit, run_bench

sizes = [int(s) for s in sys.argv[1:]] or [10**3, 10**4, 10**5]

# %%
records = run_bench(sizes=sizes, generator="email", seed=0)
print(f"{'n':>9} {'prep steps':>12} {'outputs':>8} {'max delay':>10} {'stack':>6} {'seconds':>8}")
for r in records:
    print(f"{r.n:>9} {r.preprocessing_steps:>12} {r.outputs:>8} {r.max_delay_steps:>10} "
          f"{r.peak_stack:>6} {r.preprocessing_seconds + r.enumeration_seconds:>8.2f}")

# %%
# A straight line fits the preprocessing counts closely.
a, b, residuals = linear_fit([r.n for r in records], [r.preprocessing_steps for r in records])
print(f"steps ~ {a:.1f} * n {b:+.0f}; worst relative residual {max(residuals):.4f}")

# %%
# Long stretches without any '@' are skipped by the jump index, so even a
# hostile document keeps the delay flat.
for r in run_bench(sizes=sizes, generator="adversarial", seed=0, token=200):
    print(f"adversarial n={r.n}: outputs={r.outputs} max delay={r.max_delay_steps}")
