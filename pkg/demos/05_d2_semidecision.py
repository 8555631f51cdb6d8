"""Deciding emptiness in two dimensions, honestly.

No algorithm decides emptiness for all d >= 2 SFTs, so the library runs two
searches side by side: an exact existence check over growing square patterns
(a failure certifies emptiness at that side length) and a wraparound search
over growing torus shapes (a success certifies nonemptiness with a finite
orbit).  Draws that exhaust both cutoffs stay Unknown and are reported as
such rather than guessed.
"""

from collections import Counter

from sftlab.analysis import decide_empty
from sftlab.ensemble import EnsembleParams, sample

for alpha in (0.06, 0.12, 0.2):
    params = EnsembleParams(alphabet=2, d=2, n=2, alpha=alpha, seed=13)
    verdicts = Counter()
    certs = Counter()
    for trial in range(800):
        v = decide_empty(sample(params, trial), k_max=8, torus_max=6)
        verdicts[v.verdict] += 1
        if v.verdict == "empty":
            certs[f"empty@k={v.certificate_k}"] += 1
        elif v.verdict == "nonempty":
            certs[f"orbit size {v.certificate_orbit.size}"] += 1
    print(f"alpha={alpha}: {dict(verdicts)}")
    for tag, cnt in sorted(certs.items()):
        print(f"    {tag}: {cnt}")
