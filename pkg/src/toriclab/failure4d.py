"""4D logical-failure test: run a decoder to convergence on perfect syndromes.

Deterministic decoders (Toom) are stuck when a state repeats; stochastic
decoders are stuck after a window of sweeps without any syndrome-weight
decrease.  A hard iteration cap guarantees termination and is logged
distinctly via the capped flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Torus4D

RESTORED = "restored"
LOGICAL_FAILURE = "logical_failure"
RESIDUAL_STUCK = "residual_stuck"

DEFAULT_MAX_ITERS = 10_000
DEFAULT_STAGNATION_WINDOW = 50


@dataclass(frozen=True)
class ConvergenceOutcome:
    outcome: str
    iterations_used: int
    capped: bool = False

    @property
    def restored(self) -> bool:
        return self.outcome == RESTORED


@dataclass
class FailureStats:
    n_res: int = 0
    n_log: int = 0
    n_restored: int = 0

    def record(self, outcome: ConvergenceOutcome) -> "FailureStats":
        if outcome.outcome == RESIDUAL_STUCK:
            self.n_res += 1
        elif outcome.outcome == LOGICAL_FAILURE:
            self.n_log += 1
        else:
            self.n_restored += 1
        return self

    def merge(self, other: "FailureStats") -> "FailureStats":
        self.n_res += other.n_res
        self.n_log += other.n_log
        self.n_restored += other.n_restored
        return self

    @property
    def ratio(self) -> float:
        if self.n_log == 0:
            raise ZeroDivisionError("N_res/N_log undefined with N_log = 0")
        return self.n_res / self.n_log


def converge_perfect(decoder, error: np.ndarray, rng,
                     max_iters: int = DEFAULT_MAX_ITERS,
                     stagnation_window: int = DEFAULT_STAGNATION_WINDOW) -> ConvergenceOutcome:
    """Iterate the decoder with noiseless syndromes until restored or stuck.

    Works on a copy; the caller's error chain is untouched.  An empty
    syndrome classifies by homology of the accumulated error-plus-recovery
    chain; otherwise stuck detection depends on whether the decoder is
    deterministic.
    """
    torus: Torus4D = decoder.torus
    state = error.copy()
    deterministic = getattr(decoder, "deterministic", False)
    seen = set() if deterministic else None
    best_weight = None
    no_decrease = 0
    for it in range(max_iters):
        synd = torus.syndrome(state)
        weight = int(synd.sum())
        if weight == 0:
            cls = LOGICAL_FAILURE if any(torus.homology_bits(state)) else RESTORED
            return ConvergenceOutcome(cls, it)
        if deterministic:
            key = state.tobytes()
            if key in seen:
                return ConvergenceOutcome(RESIDUAL_STUCK, it)
            seen.add(key)
        else:
            if best_weight is None or weight < best_weight:
                best_weight = weight
                no_decrease = 0
            else:
                no_decrease += 1
                if no_decrease >= stagnation_window:
                    return ConvergenceOutcome(RESIDUAL_STUCK, it)
        state ^= decoder.cycle(synd, rng)
    return ConvergenceOutcome(RESIDUAL_STUCK, max_iters, capped=True)
