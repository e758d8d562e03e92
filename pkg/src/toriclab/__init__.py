"""Local decoders for the 2D and 4D toric codes.

Cellular-automaton and box decoders, Monte Carlo memory-time experiments
under phenomenological noise, and threshold fits.
"""

__version__ = "0.1.0"
