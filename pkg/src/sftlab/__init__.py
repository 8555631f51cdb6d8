"""sftlab: a laboratory for random Z^d shifts of finite type.

Library layout:
  geometry     integer geometry of Z^d (cubes, faces, skeletons, boundaries)
  patterns     patterns on finite shapes, window codecs, complexity histograms
  ensemble     the random allowed-window model and its counter-based sampling
  orbits       finite-orbit counting/enumeration and low-complexity extraction
  zeta         truncated inverse zeta products with certified tails
  analysis     emptiness decisions, pattern counts, entropy bounds
  repeatcover  repeats, covers, reconstruction, efficient cover selections
  experiments  deterministic Monte Carlo harness
  cli          the `sftlab` command line
"""

__version__ = "0.1.0"

from . import geometry, patterns, ensemble, orbits, zeta, analysis, repeatcover
from . import experiments

__all__ = [
    "__version__", "geometry", "patterns", "ensemble", "orbits", "zeta",
    "analysis", "repeatcover", "experiments",
]
