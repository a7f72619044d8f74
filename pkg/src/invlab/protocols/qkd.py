"""Key distribution over a depolarizing qubit channel via sign-invariants.

Alice sends many copies of a handful of qubit states; Bob measures a
uniformly random Pauli each round. The ratios <sx>/<sz> and <sy>/<sz>
survive depolarization, so their signs carry two key bits per state no
matter how strong the (sub-critical) noise is. Decoy states interleaved at
a configurable rate expose an eavesdropper: any intercept-resend or
entangle-and-measure attack disturbs the decoy statistics on the matching
measurement axis far beyond what the channel alone can.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..operators import as_rng, pauli_x, pauli_y, pauli_z, substream

# Message states keep every Bloch component at least this large so the
# invariant signs survive shot noise and channel shrinkage.
MIN_BLOCH_COMPONENT = 0.2
RESAMPLE_LIMIT = 1000

_PAULIS = (pauli_x(), pauli_y(), pauli_z())
_AXIS_NAMES = ("x", "y", "z")


class DegenerateStateError(RuntimeError):
    """Resampling could not produce a message state off the coordinate planes."""


class ZeroInvariantError(ValueError):
    """An invariant estimate is exactly zero and carries no sign bit."""


def decode_key_symbol(i1: float, i2: float) -> str:
    """Two key bits from the invariant signs: (+,+)->00 (+,-)->01 (-,+)->10 (-,-)->11."""
    if i1 == 0 or i2 == 0:
        raise ZeroInvariantError("invariant is exactly zero; symbol undecodable")
    return ("0" if i1 > 0 else "1") + ("0" if i2 > 0 else "1")


def _axis_index(vector) -> tuple[int, int]:
    """Match a unit 3-vector to a signed Pauli axis (axis index, sign)."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError(f"decoy axis must be a unit 3-vector, got {vector!r}")
    for i in range(3):
        for sign in (1, -1):
            if np.allclose(v, sign * np.eye(3)[i], atol=1e-9):
                return i, sign
    raise ValueError(
        "decoy axes must point along a Pauli axis; matching-axis checking "
        f"is undefined otherwise (got {vector!r})")


@dataclass(frozen=True)
class QkdConfig:
    n_states: int                 # distinct message states
    copies_per_state: int         # rounds carrying each message state
    depolarizing_p: float
    decoy_fraction: float = 0.1
    decoy_axes: tuple = ((0.0, 0.0, 1.0), (1.0, 0.0, 0.0))
    eve_model: str = "none"       # none | intercept | entangle
    detection_threshold: float | None = None  # None: max(0.1, p/2 + 0.05)
    seed: int = 0

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("need at least one message state")
        if self.copies_per_state < 100:
            raise ValueError("need at least 100 copies per state")
        if not 0.0 < self.decoy_fraction < 1.0:
            raise ValueError("decoy fraction must be in (0, 1)")
        if not 0.0 <= self.depolarizing_p <= 1.0:
            raise ValueError("depolarizing strength must be in [0, 1]")
        if self.eve_model not in ("none", "intercept", "entangle"):
            raise ValueError(f"unknown eve model {self.eve_model!r}")
        if self.detection_threshold is not None and not 0.0 < self.detection_threshold < 1.0:
            raise ValueError("detection threshold must be in (0, 1)")
        if len(self.decoy_axes) != 2:
            raise ValueError("exactly two decoy axes required")
        for axis in self.decoy_axes:
            _axis_index(axis)

    @property
    def threshold(self) -> float:
        # The channel itself flips a matching-axis decoy outcome with
        # probability p/2; the rule leaves headroom above that floor.
        if self.detection_threshold is not None:
            return self.detection_threshold
        return max(0.1, self.depolarizing_p / 2 + 0.05)


@dataclass
class QkdTranscript:
    """Full record of one protocol run."""

    config: QkdConfig
    is_decoy: np.ndarray          # per round
    source_id: np.ndarray         # message-state index, or decoy index for decoys
    observable: np.ndarray        # 0/1/2 for sigma_x/y/z
    outcome: np.ndarray           # +-1
    alice_bloch: np.ndarray       # (n_states, 3) exact Bloch vectors
    estimates: np.ndarray         # (n_states, 3) Bob's sample means
    invariants: np.ndarray        # (n_states, 2) estimated (I1, I2)
    true_invariants: np.ndarray   # (n_states, 2) from the exact states
    decoy_rate: float             # aggregate matching-axis disagreement
    decoy_rate_by_axis: dict = field(default_factory=dict)
    decoy_checks: int = 0
    aborted: bool = False
    key_bits: str = ""
    true_key_bits: str = ""


def eve_intercept_resend(rho: np.ndarray, seed) -> np.ndarray:
    """Measure a uniformly random Pauli and forward the collapsed eigenstate."""
    rng = as_rng(seed)
    axis = int(rng.integers(3))
    sigma = _PAULIS[axis]
    p_plus = 0.5 * (1.0 + np.trace(sigma @ rho).real)
    outcome = 1 if rng.random() < p_plus else -1
    return 0.5 * (np.eye(2, dtype=complex) + outcome * sigma)


def eve_entangle_measure(rho: np.ndarray) -> np.ndarray:
    """Bob's marginal after Eve's CNOT coupling to a fresh ancilla.

    The coupling copies the computational basis onto Eve's ancilla, so
    tracing her out leaves the input with its off-diagonal terms erased,
    whatever she later measures.
    """
    return np.diag(np.diag(np.asarray(rho, dtype=complex)))


def _draw_message_states(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure-state Bloch vectors with all components off zero."""
    out = np.empty((n, 3))
    for i in range(n):
        for _ in range(RESAMPLE_LIMIT):
            v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            v /= np.linalg.norm(v)
            bloch = np.array([
                2 * (v[0].conjugate() * v[1]).real,
                2 * (v[0].conjugate() * v[1]).imag,
                (abs(v[0]) ** 2 - abs(v[1]) ** 2),
            ])
            if np.min(np.abs(bloch)) >= MIN_BLOCH_COMPONENT:
                out[i] = bloch
                break
        else:
            raise DegenerateStateError(
                f"could not draw a message state with |<sigma>| >= "
                f"{MIN_BLOCH_COMPONENT} in {RESAMPLE_LIMIT} attempts")
    return out


def run_qkd(cfg: QkdConfig) -> QkdTranscript:
    """Simulate a full run: scheduling, channel, optional Eve, sifting, key."""
    k, m = cfg.n_states, cfg.copies_per_state
    alice = _draw_message_states(k, substream(cfg.seed, 0))

    # Decoy Bloch vectors: +-axis for each of the two decoy directions.
    axes = [_axis_index(a) for a in cfg.decoy_axes]
    decoy_bloch = np.zeros((4, 3))
    for d, (axis, sign) in enumerate((a, s) for (a, s0) in axes for s in (s0, -s0)):
        decoy_bloch[d, axis] = sign
    decoy_axis_of = np.array([axes[0][0], axes[0][0], axes[1][0], axes[1][0]])
    decoy_sign_of = np.array([axes[0][1], -axes[0][1], axes[1][1], -axes[1][1]])

    n_msg = k * m
    n_decoy = int(round(cfg.decoy_fraction / (1.0 - cfg.decoy_fraction) * n_msg))
    n_rounds = n_msg + n_decoy

    rng_sched = substream(cfg.seed, 1)
    is_decoy = np.zeros(n_rounds, dtype=bool)
    is_decoy[:n_decoy] = True
    source = np.concatenate([
        rng_sched.integers(0, 4, size=n_decoy),
        np.repeat(np.arange(k), m),
    ])
    perm = rng_sched.permutation(n_rounds)
    is_decoy, source = is_decoy[perm], source[perm]

    # Bloch vectors of everything Bob can receive, after the channel. Rows:
    # 0..k-1 message states, k..k+3 decoys.
    table = np.vstack([alice, decoy_bloch]) * (1.0 - cfg.depolarizing_p)
    row = np.where(is_decoy, k + source, source)

    rng_bob = substream(cfg.seed, 2)
    bob_axis = rng_bob.integers(0, 3, size=n_rounds)

    if cfg.eve_model == "intercept":
        rng_eve = substream(cfg.seed, 3)
        eve_axis = rng_eve.integers(0, 3, size=n_rounds)
        p_eve = 0.5 * (1.0 + table[row, eve_axis])
        eve_out = np.where(rng_eve.random(n_rounds) < p_eve, 1, -1)
        coin = np.where(rng_bob.random(n_rounds) < 0.5, 1, -1)
        outcome = np.where(bob_axis == eve_axis, eve_out, coin).astype(np.int8)
    else:
        bloch = table
        if cfg.eve_model == "entangle":
            bloch = table.copy()
            bloch[:, 0] = 0.0  # computational-basis dephasing kills x and y
            bloch[:, 1] = 0.0
        p_plus = 0.5 * (1.0 + bloch[row, bob_axis])
        outcome = np.where(rng_bob.random(n_rounds) < p_plus, 1, -1).astype(np.int8)

    # Decoy reveal: disagreement on rounds where Bob measured the decoy axis.
    matching = is_decoy & (bob_axis == decoy_axis_of[np.where(is_decoy, source, 0)])
    expected = decoy_sign_of[source[matching]]
    disagree = outcome[matching] != expected
    checks = int(matching.sum())
    rate = float(disagree.mean()) if checks else 0.0
    rate_by_axis = {}
    for a_idx, (axis, _) in enumerate(axes):
        sel = decoy_axis_of[source[matching]] == axis
        rate_by_axis[_AXIS_NAMES[axis]] = float(disagree[sel].mean()) if sel.any() else 0.0

    true_inv = np.column_stack([alice[:, 0] / alice[:, 2], alice[:, 1] / alice[:, 2]])
    true_key = "".join(decode_key_symbol(i1, i2) for i1, i2 in true_inv)

    transcript = QkdTranscript(
        config=cfg, is_decoy=is_decoy, source_id=source, observable=bob_axis,
        outcome=outcome, alice_bloch=alice,
        estimates=np.zeros((k, 3)), invariants=np.zeros((k, 2)),
        true_invariants=true_inv, decoy_rate=rate, decoy_rate_by_axis=rate_by_axis,
        decoy_checks=checks, true_key_bits=true_key)

    if rate > cfg.threshold:
        transcript.aborted = True
        return transcript

    # Sifting: Alice reveals which rounds carried the same state; Bob averages
    # his outcomes per (state, observable).
    msg = ~is_decoy
    idx = source[msg] * 3 + bob_axis[msg]
    sums = np.bincount(idx, weights=outcome[msg], minlength=3 * k)
    counts = np.bincount(idx, minlength=3 * k)
    if np.any(counts == 0):
        raise ZeroInvariantError("some (state, observable) cell got no rounds")
    est = (sums / counts).reshape(k, 3)
    if np.any(est[:, 2] == 0) or np.any(est[:, 0] == 0) or np.any(est[:, 1] == 0):
        raise ZeroInvariantError("an expectation estimate is exactly zero")
    inv = np.column_stack([est[:, 0] / est[:, 2], est[:, 1] / est[:, 2]])

    transcript.estimates = est
    transcript.invariants = inv
    transcript.key_bits = "".join(decode_key_symbol(i1, i2) for i1, i2 in inv)
    return transcript
