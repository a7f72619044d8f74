"""Finite-shot projective measurement with seeded, reproducible sampling.

Expectation values in the protocol layer are estimated from simulated
measurement records rather than read off the density matrix, so they carry
realistic statistical noise. Sampling is deterministic given (seed, stream):
concurrent estimates of different observables must use distinct streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import as_rng, dag, hermitian_parts, substream

HERMITICITY_TOL = 1e-10
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class EstimationResult:
    """A sampled expectation value with its per-component standard error."""

    estimate: complex
    std_error: float        # real part, sample std / sqrt(shots)
    std_error_imag: float   # imaginary part; 0 for Hermitian observables
    shots: int
    label: str = ""


def born_probabilities(rho: np.ndarray, observable: np.ndarray
                       ) -> list[tuple[float, float]]:
    """Outcome spectrum of a Hermitian observable on a state.

    Returns (eigenvalue, probability) pairs sorted by eigenvalue, with
    degenerate eigenvalues merged so outcome labels are physical. Slightly
    negative probabilities from rounding are clipped and the distribution
    renormalized.
    """
    observable = np.asarray(observable, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if observable.shape != rho.shape:
        raise ValueError(f"dimension mismatch: {observable.shape} vs {rho.shape}")
    if np.max(np.abs(observable - dag(observable))) > HERMITICITY_TOL:
        raise ValueError("observable must be Hermitian")
    evals, evecs = np.linalg.eigh(observable)
    raw = np.real(np.einsum("ij,jk,ki->i", dag(evecs), rho, evecs))
    if raw.min() < -1e-10:
        raise ValueError(f"negative outcome probability {raw.min():.3e}; invalid state")
    total = raw.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"probabilities sum to {total!r}, not 1")

    merged: list[tuple[float, float]] = []
    run_vals = [evals[0]]
    run_prob = raw[0]
    for w, p in zip(evals[1:], raw[1:]):
        if w - run_vals[-1] <= MERGE_TOL:
            run_vals.append(w)
            run_prob += p
        else:
            merged.append((float(np.mean(run_vals)), float(run_prob)))
            run_vals, run_prob = [w], p
    merged.append((float(np.mean(run_vals)), float(run_prob)))

    probs = np.clip([p for _, p in merged], 0.0, 1.0)
    probs = probs / probs.sum()
    return [(w, float(p)) for (w, _), p in zip(merged, probs)]


def measure_observable(rho: np.ndarray, observable: np.ndarray, shots: int, seed
                       ) -> EstimationResult:
    """Sample `shots` outcomes of a Hermitian observable and average them."""
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    spectrum = born_probabilities(rho, observable)
    values = np.array([w for w, _ in spectrum])
    probs = np.array([p for _, p in spectrum])
    rng = as_rng(seed)
    counts = rng.multinomial(shots, probs)
    mean = float(counts @ values) / shots
    if shots > 1:
        var = float(counts @ (values - mean) ** 2) / (shots - 1)
    else:
        var = 0.0
    return EstimationResult(estimate=complex(mean), std_error=float(np.sqrt(var / shots)),
                            std_error_imag=0.0, shots=shots)


def estimate_expectation(rho: np.ndarray, op: np.ndarray, shots: int, seed
                         ) -> EstimationResult:
    """Estimate the (complex) expectation of an arbitrary operator.

    The operator splits as H1 + i H2 with both parts Hermitian; each part is
    measured separately on half the shot budget (odd totals give the extra
    shot to the real part).
    """
    shots = int(shots)
    if shots < 2:
        raise ValueError("shots must be >= 2 to cover both Hermitian parts")
    h1, h2 = hermitian_parts(op)
    if isinstance(seed, np.random.Generator):
        seed_re: object = seed.integers(2**63)
        seed_im: object = seed.integers(2**63)
    else:
        seed_re = substream(int(seed), 0)
        seed_im = substream(int(seed), 1)
    re = measure_observable(rho, h1, (shots + 1) // 2, seed_re)
    im = measure_observable(rho, h2, shots // 2, seed_im)
    return EstimationResult(
        estimate=complex(re.estimate.real, im.estimate.real),
        std_error=re.std_error, std_error_imag=im.std_error, shots=shots)
