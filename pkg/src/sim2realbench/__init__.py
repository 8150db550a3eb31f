"""Sim2Real driving-data benchmark harness.

Converts semantic label maps between simulator and real-world
taxonomies, assembles validation sets, and evaluates generated image
sets with full-reference/no-reference image quality metrics, set-level
Frechet distance, and segmentation metrics.
"""

__version__ = "0.1.0"
