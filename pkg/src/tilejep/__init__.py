"""tilejep: tiling problems compiled into hereditary graph classes, with
joint-embedding experiments run at desk scale."""

__version__ = "0.1.0"
