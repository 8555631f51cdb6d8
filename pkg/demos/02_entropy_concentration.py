"""Entropy of random SFTs concentrates at log(alpha * |A|).

For each draw we compute an upper bound (1/k) log(#allowed length-k words)
and a certified lower bound on periodic entropy, (1/k) log of the number of
allowed words with a periodic boundary.  Both pile up near
log+(alpha * |A|): supercritical draws carry entropy, subcritical draws are
empty or thin.
"""

import math

from sftlab import experiments as X

ALPHAS = (0.3, 0.55, 0.75, 0.95)

cfg = X.ExperimentConfig(d=1, alphabet=2, n=8, alphas=ALPHAS, trials=200,
                         seed=11, k=32, boundary_samples=128)
result = X.run_entropy_experiment(cfg)

print(f"{'alpha':>6} | {'target':>7} | {'mean upper':>10} | {'mean per-lower':>14} | {'empty':>5}")
print("-" * 58)
for row in result.rows:
    print(f"{row['alpha']:>6} | {row['target']:>7.4f} | {row['h_upper_mean']:>10.4f} | "
          f"{row['h_per_mean']:>14.4f} | {row['empty_trials']:>5}")

print()
print("Deviation frequencies P(|h_upper - target| >= eps):")
for row in result.rows:
    cells = ", ".join(f"eps={eps:g}: {row[f'frac_h_upper_dev_{eps:g}']:.3f}"
                      for eps in cfg.epsilons)
    print(f"  alpha={row['alpha']}: {cells}")

print()
print("Note the finite-size gap: at k=32 the upper bound carries a")
print(f"+{(1 - 25/32) * math.log(2):.3f}-ish surplus from boundary windows, and the")
print("periodic lower bound pays for its boundary pool; both gaps close as k grows.")
