"""depthclick: single-click object segmentation on RGB, pseudo-depth and fused inputs."""

__version__ = "0.1.0"
