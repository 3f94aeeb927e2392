"""Integrated search toolkit: focused crawling, tf-idf retrieval over an
inverted index, metasearch merging, result categorization and clustering,
profile-driven personalization, and a precision/recall evaluation harness.
"""

__version__ = "0.1.0"
