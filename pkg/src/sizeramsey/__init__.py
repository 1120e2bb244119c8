"""Block decomposition, sparse-regular embedding, and Ramsey arrowing tools.

Subpackages:
- graph: bitset graphs, G(n,p) and random cubic samplers, named graphs
- decompose: induced path/cycle block decompositions of subcubic graphs
- regularity: (eps,p)-regular pair oracles, cleanup, inheritance probe
- embedder: candidate sets, first-free-bucket trees/cycles, block pipeline
- ramsey: exhaustive and heuristic arrowing, colored-host pipeline
- experiment / cli: reproducible threshold-scan experiments

Set SIZERAMSEY_NO_NUMBA=1 to force the pure-numpy kernel path
(``sizeramsey._kernels.BACKEND`` reports which one is active).
"""

__version__ = "1.0.0"

from ._kernels import BACKEND  # noqa: F401
from .graph import Graph, GnpParams, gnp_sample, named_graph, random_cubic  # noqa: F401
