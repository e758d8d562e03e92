"""Phenomenological noise: i.i.d. qubit Z-flips and syndrome bit-flips.

Randomness is counter-based (Philox) keyed by (seed, trial) with the QEC
cycle and a phase tag in the counter, so trial-parallel runs are bit-exact
regardless of worker count or scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

# Phase tags carving up one trial's randomness into independent streams.
PHASE_DATA = 0
PHASE_MEAS = 1
PHASE_DECODER = 2
PHASE_PROBE = 3
PHASE_INIT = 4

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseParams:
    """Data-error probability p and measurement-error probability q."""

    p: float
    q: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError(f"probabilities must lie in [0,1]: p={self.p} q={self.q}")


class TrialRng:
    """Reproducible per-trial randomness.

    Identical (seed, stream_id) reproduces identical sequences; distinct
    stream_ids are independent.  `generator(cycle, phase)` returns a
    Generator whose output depends only on (seed, stream_id, cycle, phase)
    and the order of draws made from it.  The Philox counter is reset in
    place rather than reconstructed; the stream is identical to a fresh
    Philox(key=(seed, stream), counter=(cycle, phase, 0, 0)).

    The returned Generator is a shared, reused object: finish drawing from
    it before requesting the next phase.  Use fresh_generator() for a
    stream that must stay live across phases (e.g. a convergence probe).
    """

    def __init__(self, seed: int, stream_id: int):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._bg = Philox(key=[self.seed, self.stream_id])
        self._gen = Generator(self._bg)
        self._state = self._bg.state

    def generator(self, cycle: int, phase: int) -> Generator:
        st = self._state
        st["state"]["counter"][:] = (int(cycle) & _MASK64, int(phase) & _MASK64, 0, 0)
        st["state"]["key"][:] = (self.seed, self.stream_id)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self._gen

    def fresh_generator(self, cycle: int, phase: int) -> Generator:
        """Independent Generator object (for probes that outlive the cycle)."""
        bg = Philox(key=[self.seed, self.stream_id],
                    counter=[int(cycle) & _MASK64, int(phase) & _MASK64, 0, 0])
        return Generator(bg)


def bernoulli_mask(rng: Generator, shape, prob: float) -> np.ndarray:
    """uint8 array of independent Bernoulli(prob) draws."""
    if prob <= 0.0:
        return np.zeros(shape, np.uint8)
    if prob >= 1.0:
        return np.ones(shape, np.uint8)
    return (rng.random(shape) < prob).astype(np.uint8)


def apply_data_noise(error: np.ndarray, params: NoiseParams, rng: Generator) -> np.ndarray:
    """XOR each qubit bit with an independent Bernoulli(p) draw."""
    return error ^ bernoulli_mask(rng, error.shape, params.p)


def measure_syndrome(error: np.ndarray, params: NoiseParams, rng: Generator,
                     torus) -> np.ndarray:
    """Perfect check measurement followed by a Bernoulli(q) bit-flip channel."""
    synd = torus.syndrome(error)
    if params.q > 0.0:
        synd = synd ^ bernoulli_mask(rng, synd.shape, params.q)
    return synd
