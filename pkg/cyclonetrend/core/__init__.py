"""
CycloneTrend - Core App
=======================

Shared plumbing for the command line: the exception hierarchy, yearly count
ingestion, run configuration and atomic output writers.
"""
