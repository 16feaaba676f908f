"""diffconcepts - formal concept structures from multivariate trajectories."""

__version__ = "0.1.0"
