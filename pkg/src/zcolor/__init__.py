"""Integer colorings of link diagrams and their reduction to simple colorings."""

__version__ = "0.1.0"
