"""kyforms: a verification workbench for Killing-Yano and conformal
Killing-Yano superalgebras on constant-curvature spacetimes."""

__version__ = "0.1.0"
