"""Tree-Kummer distributions, their rooted transformations and a test harness."""

__version__ = "0.1.0"
