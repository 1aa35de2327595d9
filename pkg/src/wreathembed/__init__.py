"""Explicit wreath-product embeddings of groups into 2- and 4-generated
groups, with machine-checked certificates."""

__version__ = "0.1.0"

from .errors import WreathEmbedError  # noqa: E402

__all__ = ["WreathEmbedError", "__version__"]
