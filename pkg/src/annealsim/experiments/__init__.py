"""Bundled experiment configs reproducing the package's reference figures."""
