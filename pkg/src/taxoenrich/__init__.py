"""Taxonomy enrichment toolkit.

Builds diachronic orphan-word datasets from two releases of a wordnet-style
taxonomy, predicts hypernym synsets for orphan words from static word
embeddings (optionally combined with Wiktionary features through a logistic
regression ranker), and evaluates predictions with connected-component MAP.
"""

__version__ = "0.1.0"
