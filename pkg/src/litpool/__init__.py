"""litpool: journal-pool-bounded scholarly search and insight service."""

__version__ = "0.1.0"
