"""
posmaps - Positive Maps from Block Matrices
Channel and PNCP-map constructions, positivity certification and entanglement detection
"""

__version__ = "1.0.0"
