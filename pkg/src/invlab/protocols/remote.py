"""Remote transfer of a measurement direction through a depolarizing channel.

Alice and Bob share a singlet whose second qubit crossed a depolarizing
channel, leaving the Werner state (1 - alpha sigma.sigma)/4 with
alpha = 1 - 4p (p is the per-Pauli corruption weight, p0 + 3p = 1; in
terms of the single-parameter catalog channel, p_dep = 1 - alpha = 4p).
Alice measures sigma.m on her qubit; Bob's conditional state is
(1 -+ alpha sigma.m)/2, so the ratios m_y/m_x and m_y/m_z reach him
untouched by the channel strength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..measurement import measure_observable
from ..operators import pauli_x, pauli_y, pauli_z, substream

ALPHA_FLOOR = 0.05
COMPONENT_FLOOR = 0.1


@dataclass(frozen=True)
class RemoteTransferConfig:
    direction: tuple          # Alice's measurement direction, unit 3-vector
    p: float                  # per-Pauli corruption weight, p0 = 1 - 3p
    shots: int
    seed: int = 0
    outcome_branch: int = 1   # condition on Alice's +1 or -1 outcome

    def __post_init__(self):
        m = np.asarray(self.direction, dtype=float)
        if m.shape != (3,) or abs(np.linalg.norm(m) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit 3-vector")
        if np.min(np.abs(m)) < COMPONENT_FLOOR:
            raise ValueError(
                f"direction components must stay >= {COMPONENT_FLOOR} in magnitude "
                "(the transferred ratios blow up near a coordinate plane)")
        if not 0.0 <= self.p <= 1.0 / 3.0:
            raise ValueError("p must be in [0, 1/3] (p0 = 1 - 3p must be a probability)")
        if abs(self.alpha) < ALPHA_FLOOR:
            raise ValueError(f"|alpha| = |1 - 4p| must be >= {ALPHA_FLOOR}")
        if self.shots < 3:
            raise ValueError("need at least one shot per Pauli")
        if self.outcome_branch not in (1, -1):
            raise ValueError("outcome_branch must be +1 or -1")

    @property
    def alpha(self) -> float:
        return 1.0 - 4.0 * self.p


@dataclass(frozen=True)
class RemoteTransferResult:
    config: RemoteTransferConfig
    pauli_estimates: tuple        # Bob's (<sx>, <sy>, <sz>) sample means
    pauli_std_errors: tuple
    ratio_estimates: tuple        # (I1, I2) = (<sy>/<sx>, <sy>/<sz>)
    ratio_std_errors: tuple
    true_ratios: tuple            # (m_y/m_x, m_y/m_z)
    abs_errors: tuple


def corrupted_singlet(alpha: float) -> np.ndarray:
    """Two-qubit Werner state (1 - alpha sigma.sigma)/4."""
    rho = np.eye(4, dtype=complex)
    for s in (pauli_x(), pauli_y(), pauli_z()):
        rho -= alpha * np.kron(s, s)
    return rho / 4.0


def conditional_bob_state(alpha: float, direction, branch: int = 1) -> np.ndarray:
    """Bob's exact state after Alice measures sigma.m and gets `branch`."""
    m = np.asarray(direction, dtype=float)
    sig_m = m[0] * pauli_x() + m[1] * pauli_y() + m[2] * pauli_z()
    proj = 0.5 * (np.eye(2, dtype=complex) + branch * sig_m)
    joint = np.kron(proj, np.eye(2, dtype=complex))
    post = joint @ corrupted_singlet(alpha) @ joint
    bob = np.einsum("iaib->ab", post.reshape(2, 2, 2, 2))
    return bob / np.trace(bob).real


def run_remote_transfer(cfg: RemoteTransferConfig) -> RemoteTransferResult:
    rho_b = conditional_bob_state(cfg.alpha, cfg.direction, cfg.outcome_branch)
    per_pauli = cfg.shots // 3
    results = [
        measure_observable(rho_b, sigma, per_pauli, substream(cfg.seed, a))
        for a, sigma in enumerate((pauli_x(), pauli_y(), pauli_z()))
    ]
    est = np.array([r.estimate.real for r in results])
    se = np.array([r.std_error for r in results])
    if est[0] == 0 or est[2] == 0:
        raise ZeroDivisionError("a denominator estimate is exactly zero; add shots")

    i1, i2 = est[1] / est[0], est[1] / est[2]
    # First-order error propagation through the quotients.
    se_i1 = abs(i1) * np.hypot(se[1] / est[1], se[0] / est[0])
    se_i2 = abs(i2) * np.hypot(se[1] / est[1], se[2] / est[2])

    m = np.asarray(cfg.direction, dtype=float)
    true = (m[1] / m[0], m[1] / m[2])
    return RemoteTransferResult(
        config=cfg,
        pauli_estimates=tuple(est), pauli_std_errors=tuple(se),
        ratio_estimates=(float(i1), float(i2)),
        ratio_std_errors=(float(se_i1), float(se_i2)),
        true_ratios=true,
        abs_errors=(abs(i1 - true[0]), abs(i2 - true[1])))
