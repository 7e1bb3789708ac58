"""conceptlab: concept learning in the limit, active sensing, verification games."""

__version__ = "0.1.0"
