"""Qualitative bankruptcy-risk decision support.

Six expert ratings in, a bankrupt / non-bankrupt verdict out — via five
from-scratch classifiers, a reproducible cross-validated evaluation
pipeline, feature-selection reports, versioned model artifacts, a CLI, and
an HTTP prediction service.
"""

__version__ = "0.1.0"
