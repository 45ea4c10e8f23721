"""Concept segmentation of co-evolving multivariate series with a self-expressive autoencoder."""

__version__ = "0.1.0"
