"""Batch figure generation from detection-experiment CSV files.

Consumes the exported tables (curves.csv, loglr_samples.csv, theory.csv)
and renders PNG figures: log-likelihood-ratio histograms with limiting
Gaussian overlays, and empirical-vs-theoretical error curves.  Rendering
is a pure function of the input files: fixed style, fixed dpi, no
timestamps, so identical inputs give byte-identical images.
"""

from .figures import FigureSpec, plot_error_curves, plot_histograms

__all__ = ["FigureSpec", "plot_histograms", "plot_error_curves"]
__version__ = "0.1.0"
