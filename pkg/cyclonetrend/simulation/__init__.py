"""
CycloneTrend - Simulation App
=============================

Synthetic non-homogeneous Poisson data and parametric-bootstrap resamples.
Used as the verification oracle for estimation and testing.
"""
