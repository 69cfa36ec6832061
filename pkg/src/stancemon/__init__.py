"""Stance monitoring for vaccination discussions on social media."""

__version__ = "0.1.0"
