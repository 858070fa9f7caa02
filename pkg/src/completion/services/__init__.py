"""Numeric services for completion-time regions of Gaussian BC/IC channels."""
