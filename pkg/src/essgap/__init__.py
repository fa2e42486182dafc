"""
essgap

Exact ess(f), ess_k(f), cs(f), ds(f) and mi(f) for small Boolean functions,
with generators and verifiers for the families that separate ess from cs.
"""

__version__ = "0.1.0"

from essgap.toolkit import EssGapToolkit

__all__ = ["EssGapToolkit"]
