"""ripwire: early detection of hoax death reports in social-media streams.

The pipeline: filter a tweet stream on the uppercase RIP keyword, match
person names from a knowledge base, aggregate mentions into death
reports, label them (auto-suggestion + human annotation service), train
class-specific word embeddings, extract social and textual features
under time cutoffs and sliding windows, and evaluate a multinomial
logistic regression classifier on an early-detection grid.
"""

from ripwire._kernels import BACKEND_NAME

__version__ = "0.1.0"
__all__ = ["BACKEND_NAME", "__version__"]
