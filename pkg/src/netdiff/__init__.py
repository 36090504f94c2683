"""netdiff: diffusion simulation and inference on complex networks.

Random-graph generators, threshold-cascade and continuous-time SI
epidemics, an edge-disjoint 4-node motif census, and Metropolis-Hastings
parameter inference, with a CLI that binds them into reproducible
pipelines.
"""

__version__ = "0.1.0"

from netdiff.graph import Graph, CentralityVector

__all__ = ["Graph", "CentralityVector", "__version__"]
