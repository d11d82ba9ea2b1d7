"""
CycloneTrend - Change-Point App
===============================

Exact one-sided test of a drop in mean intensity after a pre-specified
change time, via the conditional binomial distribution.
"""
