"""Line-Leaf Trees: dynamic search structures over tree-like partial orders."""
from .llt_build import LineLeafTree, build_static
from .llt_dynamic import delete, insert
from .poset_core import HasseDiagram, Universe

__all__ = ["HasseDiagram", "LineLeafTree", "Universe", "build_static", "delete", "insert"]
__version__ = "0.1.0"
