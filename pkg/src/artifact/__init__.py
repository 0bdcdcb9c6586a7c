"""Exact p-adic verification of a relative fundamental lemma for unitary symmetric spaces."""
from .errors import ArtifactError
from .padic import PrecisionContext

__version__ = "0.1.0"

__all__ = ["ArtifactError", "PrecisionContext", "__version__"]
