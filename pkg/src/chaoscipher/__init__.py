"""Coupled logistic-map cipher laboratory."""
