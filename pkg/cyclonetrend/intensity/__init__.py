"""
CycloneTrend - Intensity App
============================

Cubic B-spline log-intensity model for binned event counts: basis
construction, Poisson regression by Fisher scoring and delta-method bands
for the intensity and its first two derivatives.
"""
