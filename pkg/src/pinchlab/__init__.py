"""Numerical verification of curvature, pinching and boundary behaviour for the
one-loop deformed universal hypermultiplet metrics g^c, their rescaled family
h^b, and the Pedersen metrics."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("pinchlab")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
