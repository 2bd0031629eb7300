"""
Certified upper bounds on the density of sets avoiding distance 1 in R^n.

The modules build on each other bottom-up:

- `specialfn`: the radial kernel Omega_n and its minimum
- `lp_core`: small dense linear programs
- `geometry`: exact point configurations and their distance graphs
- `independence`: independence numbers with provenance
- `scheme_theta`: theta / Delsarte bounds for generalized Johnson graphs
- `euclid_bound`: the subgraph-strengthened program and its certification
- `asymptotics`: exponential rate analysis
- `homog_theta`: theta numbers of abelian Cayley graphs
- `tables`, `cli`: table reproduction and the command line
"""

from ._version import __version__
from .logger import log
