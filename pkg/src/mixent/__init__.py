"""Entropy numbers of embeddings between finite-dimensional mixed-norm spaces.

Closed-form rates, explicit packing and covering certificates, a brute-force
oracle for tiny instances, and block-model bounds for sequence spaces of
dominating mixed smoothness.
"""

__version__ = "0.1.0"

from .core import INF, BoundCurve, ExponentTuple, embedding_norm, mixed_norm  # noqa: E402
from .rates import HypothesisError, matching_rate, proof_scan_rate, schuett_rate  # noqa: E402

__all__ = [
    "INF",
    "BoundCurve",
    "ExponentTuple",
    "HypothesisError",
    "embedding_norm",
    "matching_rate",
    "mixed_norm",
    "proof_scan_rate",
    "schuett_rate",
    "__version__",
]
