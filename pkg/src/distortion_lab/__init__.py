"""Learning-augmented voting and one-sided matching with exact distortion oracles."""

__version__ = "0.1.0"
