"""matelab: numerical experiments around the mating-of-trees picture of LQG."""
from .context import GammaContext

__version__ = "0.1.0"
__all__ = ["GammaContext", "__version__"]
