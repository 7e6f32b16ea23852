"""weavedown: execute literate documents and render them to HTML."""

from .errors import WeaveError
from .frontmatter import FrontMatter, OutputSpec
from .parser import parse_document

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FrontMatter",
    "OutputSpec",
    "WeaveError",
    "parse_document",
]
