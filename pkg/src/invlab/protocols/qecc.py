"""Ancilla-free error correction on a six-level system.

Choosing the code space span{|0>, |3>} makes the dominant shift errors
(one and two cyclic raises) land in mutually orthogonal two-dimensional
subspaces, so a single diagonal stabilizer measurement identifies the
error without any ancilla and the inverse shift restores the state
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..operators import as_rng, shift, substream

DIM = 6
CODE_LEVELS = (0, 3)
# Outcome labels c0 < c1 < c2 for the three error subspaces.
SYNDROME_LABELS = (0, 1, 2)

_SUBSPACES = tuple((i, i + 3) for i in range(3))  # levels spanned per outcome


def _projector(outcome: int) -> np.ndarray:
    p = np.zeros((DIM, DIM), dtype=complex)
    for level in _SUBSPACES[outcome]:
        p[level, level] = 1.0
    return p


def stabilizer() -> np.ndarray:
    """Diagonal observable whose outcome tells which shift error occurred."""
    return sum(c * _projector(i) for i, c in enumerate(SYNDROME_LABELS))


def qecc_encode(alpha: complex, beta: complex) -> np.ndarray:
    """Logical state alpha|0> + beta|3>."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-12:
        raise ValueError("amplitudes must satisfy |alpha|^2 + |beta|^2 = 1")
    psi = np.zeros(DIM, dtype=complex)
    psi[CODE_LEVELS[0]] = alpha
    psi[CODE_LEVELS[1]] = beta
    return psi


def qecc_apply_noise(psi: np.ndarray, p0: float, p1: float, p2: float, seed
                     ) -> tuple[np.ndarray, int]:
    """Sample one shift error (0, 1 or 2 raises) and apply it.

    Per-trial sampling makes syndrome outcomes definite events; averaging
    over trials recovers the mixed-state picture.
    """
    probs = np.array([p0, p1, p2], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("error probabilities must be nonnegative and sum to 1")
    rng = as_rng(seed)
    err = int(rng.choice(3, p=probs / probs.sum()))
    return np.linalg.matrix_power(shift(DIM), err) @ psi, err


def qecc_syndrome(psi: np.ndarray, seed=0) -> tuple[int, np.ndarray]:
    """Measure the stabilizer: outcome label and post-measurement state."""
    psi = np.asarray(psi, dtype=complex)
    weights = np.array([np.linalg.norm(_projector(i) @ psi) ** 2 for i in range(3)])
    weights /= weights.sum()
    if weights.max() > 1.0 - 1e-12:
        outcome = int(weights.argmax())
    else:
        outcome = int(as_rng(seed).choice(3, p=weights))
    post = _projector(outcome) @ psi
    return SYNDROME_LABELS[outcome], post / np.linalg.norm(post)


def qecc_recover(psi: np.ndarray, outcome: int) -> np.ndarray:
    """Undo the shift error named by the syndrome outcome."""
    idx = SYNDROME_LABELS.index(outcome)
    inverse = np.linalg.matrix_power(shift(DIM), (DIM - idx) % DIM)
    return inverse @ psi


@dataclass(frozen=True)
class QeccDemoConfig:
    alpha: complex
    beta: complex
    probs: tuple  # (p0, p1, p2)
    trials: int
    seed: int = 0

    def __post_init__(self):
        qecc_encode(self.alpha, self.beta)  # validates normalization
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (3,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be three nonnegative numbers summing to 1")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass(frozen=True)
class QeccDemoResult:
    config: QeccDemoConfig
    min_fidelity: float
    syndrome_frequencies: tuple
    syndrome_matches_error: bool   # outcome identified the sampled error every trial
    mixture_deviation: float       # empirical average state vs analytic mixture


def run_qecc(cfg: QeccDemoConfig) -> QeccDemoResult:
    psi0 = qecc_encode(cfg.alpha, cfg.beta)
    counts = np.zeros(3, dtype=int)
    min_fid = 1.0
    matches = True
    avg_state = np.zeros((DIM, DIM), dtype=complex)
    x6 = shift(DIM)
    for t in range(cfg.trials):
        noisy, err = qecc_apply_noise(psi0, *cfg.probs, substream(cfg.seed, t))
        avg_state += np.outer(noisy, noisy.conj())
        outcome, post = qecc_syndrome(noisy, substream(cfg.seed, t, 1))
        counts[SYNDROME_LABELS.index(outcome)] += 1
        matches &= SYNDROME_LABELS.index(outcome) == err
        recovered = qecc_recover(post, outcome)
        min_fid = min(min_fid, abs(np.vdot(psi0, recovered)) ** 2)
    avg_state /= cfg.trials
    mixture = sum(
        p * np.outer(np.linalg.matrix_power(x6, i) @ psi0,
                     (np.linalg.matrix_power(x6, i) @ psi0).conj())
        for i, p in enumerate(cfg.probs))
    return QeccDemoResult(
        config=cfg, min_fidelity=float(min_fid),
        syndrome_frequencies=tuple(counts / cfg.trials),
        syndrome_matches_error=bool(matches),
        mixture_deviation=float(np.max(np.abs(avg_state - mixture))))
