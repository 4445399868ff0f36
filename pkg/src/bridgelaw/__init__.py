"""bridgelaw: simulate and verify triplet laws of Brownian path functionals.

The package couples high-throughput path simulation (compiled kernel with a
pure-Python fallback) to exact reference samplers and closed-form densities,
and verifies each distributional identity with a statistical test harness.
"""

__version__ = "0.1.0"

from .kernel import backend_name
from .pathkit import (
    DiscretePath,
    HorizonExhausted,
    StepScheme,
    TripletSample,
    make_stream,
)

__all__ = [
    "__version__",
    "backend_name",
    "DiscretePath",
    "HorizonExhausted",
    "StepScheme",
    "TripletSample",
    "make_stream",
]
