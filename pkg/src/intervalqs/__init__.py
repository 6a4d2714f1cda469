"""Multimodal interval maps: maximal entropy measure, pull-backs and quasi-symmetric conjugacy."""

__version__ = "0.1.0"
