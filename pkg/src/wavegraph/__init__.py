"""Wave equation on weighted graphs."""

__version__ = "0.1.0"
