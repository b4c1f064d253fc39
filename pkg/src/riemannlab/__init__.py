"""riemannlab: binormal-flow solutions with polygonal data and the
multifractal analysis of the corner trajectory's limit shape."""

__version__ = "0.1.0"
