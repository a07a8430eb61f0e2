"""Association rule mining over preprocessed text corpora."""

__version__ = "0.1.0"
