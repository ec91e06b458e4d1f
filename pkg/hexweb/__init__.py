"""hexweb: graphs of hexagon decompositions of surfaces, topological and hyperbolic."""
__version__ = "1.0.0"
