"""Closed-form invariant catalog for every channel in the library.

Each entry lists operators and integer exponents whose expectation-value
product survives the channel exactly, together with how many independent
real numbers it carries. Index ranges exclude inverse powers: a unitary's
expectation and its conjugate carry the same information, so for the
shift/clock/flip-phase channels powers run only up to half the dimension,
with the self-inverse half-power (even dimension) counting once.
"""

from __future__ import annotations

import numpy as np

from .invariants import FAMILY1, FAMILY2, FAMILY3, InvariantSpec
from .operators import (
    clock,
    coherence_imag,
    coherence_real,
    level_projector,
    pauli_x,
    pauli_y,
    pauli_z,
    population_difference,
    shift,
    shift_clock,
)

CURATED_CHANNELS = (
    "generalized_pauli",
    "generalized_flip",
    "generalized_phase",
    "generalized_flip_phase",
    "depolarizing",
    "dephasing",
    "amplitude_damping",
    "bit_flip",
    "phase_flip",
    "bit_phase_flip",
    "depolarizing_qubit",
    "adc_qubit",
    "gadc_qubit",
)


def _mp(op: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(op, k)


def _weyl_family(dim: int, conserved: np.ndarray, probe: np.ndarray,
                 cons_name: str, probe_name: str) -> list[InvariantSpec]:
    """Invariants of a channel whose Kraus set is powers of one unitary.

    Powers of the generator itself are untouched; ratios of a probe power
    against the same probe power dressed with the generator share a common
    rescaling. `conserved` is the Kraus generator, `probe` the
    noncommuting partner.
    """
    specs = []
    half = dim // 2
    m_max = half if dim % 2 == 0 else (dim - 1) // 2
    for m in range(1, m_max + 1):
        self_inverse = (dim % 2 == 0 and m == half)
        specs.append(InvariantSpec(
            kind=FAMILY1, operators=(_mp(conserved, m),), exponents=(1,),
            label=f"<{cons_name}^{m}>", provenance="curated",
            real_count=1 if self_inverse else 2))
    for m in range(1, m_max + 1):
        l_max = half if (dim % 2 == 0 and m == half) else dim - 1
        for l in range(1, l_max + 1):
            self_conj = (dim % 2 == 0 and m == half and l == half)
            specs.append(InvariantSpec(
                kind=FAMILY2,
                operators=(_mp(probe, m), _mp(probe, m) @ _mp(conserved, l)),
                exponents=(1, -1),
                label=f"<{probe_name}^{m}>/<{probe_name}^{m} {cons_name}^{l}>",
                provenance="curated",
                real_count=1 if self_conj else 2))
    return specs


def _dephasing_family(dim: int) -> list[InvariantSpec]:
    specs = []
    for k in range(dim - 1):
        specs.append(InvariantSpec(
            kind=FAMILY1, operators=(population_difference(dim, k + 1, k),),
            exponents=(1,), label=f"<pop({k + 1})-pop({k})>", provenance="curated"))
    for k in range(dim):
        for l in range(k):
            specs.append(InvariantSpec(
                kind=FAMILY2,
                operators=(coherence_real(dim, k, l), coherence_imag(dim, k, l)),
                exponents=(1, -1),
                label=f"<re({k},{l})>/<im({k},{l})>", provenance="curated"))
    return specs


def _depolarizing_family(dim: int) -> list[InvariantSpec]:
    specs = []
    for k in range(dim):
        for l in range(k):
            diff = population_difference(dim, k, l)
            specs.append(InvariantSpec(
                kind=FAMILY2, operators=(coherence_real(dim, k, l), diff), exponents=(1, -1),
                label=f"<re({k},{l})>/<pop({k})-pop({l})>", provenance="curated"))
            specs.append(InvariantSpec(
                kind=FAMILY2, operators=(coherence_imag(dim, k, l), diff), exponents=(1, -1),
                label=f"<im({k},{l})>/<pop({k})-pop({l})>", provenance="curated"))
    # Populations shifted by the white-noise fixed point 1/dim are traceless
    # and rescale like every other traceless operator.
    offset = np.eye(dim, dtype=complex) / dim
    ref = level_projector(dim, 0) - offset
    for m in range(1, dim - 1):
        specs.append(InvariantSpec(
            kind=FAMILY2, operators=(level_projector(dim, m) - offset, ref),
            exponents=(1, -1),
            label=f"(<pop({m})>-1/{dim})/(<pop(0)>-1/{dim})", provenance="curated"))
    return specs


def _amplitude_damping_family(dim: int) -> list[InvariantSpec]:
    specs = []
    for k in range(dim):
        for l in range(k):
            specs.append(InvariantSpec(
                kind=FAMILY2,
                operators=(coherence_real(dim, k, l), coherence_imag(dim, k, l)),
                exponents=(1, -1),
                label=f"<re({k},{l})>/<im({k},{l})>", provenance="curated"))
    top = dim - 1
    specs.append(InvariantSpec(
        kind=FAMILY3,
        operators=(coherence_real(dim, top, 0), coherence_imag(dim, top, 0),
                   level_projector(dim, top)),
        exponents=(1, 1, -1),
        label=f"<re({top},0)><im({top},0)>/<pop({top})>", provenance="curated"))
    return specs


def _qubit_rows() -> dict[str, list[InvariantSpec]]:
    sx, sy, sz = pauli_x(), pauli_y(), pauli_z()
    pi1 = level_projector(2, 1)

    def f1(op, label):
        return InvariantSpec(FAMILY1, (op,), (1,), label, "curated")

    def ratio(a, b, label):
        return InvariantSpec(FAMILY2, (a, b), (1, -1), label, "curated")

    return {
        "bit_flip": [f1(sx, "<sx>"), ratio(sy, sz, "<sy>/<sz>")],
        "phase_flip": [f1(sz, "<sz>"), ratio(sx, sy, "<sx>/<sy>")],
        "bit_phase_flip": [f1(sy, "<sy>"), ratio(sx, sz, "<sx>/<sz>")],
        "depolarizing_qubit": [ratio(sx, sz, "<sx>/<sz>"), ratio(sy, sz, "<sy>/<sz>")],
        "adc_qubit": [
            ratio(sx, sy, "<sx>/<sy>"),
            InvariantSpec(FAMILY3, (sx, sy, pi1), (1, 1, -1), "<sx><sy>/<pop(1)>", "curated"),
        ],
        # The damping-with-pumping row: sigma_x and sigma_y rescale together
        # by sqrt(1-q), so their ratio certifies; sigma_z picks up an affine
        # identity component and <sx>/<sz> does not (see gadc_table_candidate).
        "gadc_qubit": [ratio(sx, sy, "<sx>/<sy>")],
    }


def gadc_table_candidate() -> InvariantSpec:
    """The historically quoted <sx>/<sz> ratio for damping-with-pumping.

    Kept separate from the curated list so certification can adjudicate it:
    it fails for every q > 0 because sigma_z does not rescale cleanly.
    """
    return InvariantSpec(FAMILY2, (pauli_x(), pauli_z()), (1, -1),
                         "<sx>/<sz>", "curated")


def curated_invariants(channel_name: str, dim: int) -> list[InvariantSpec]:
    """The closed-form invariant list for a catalog channel."""
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    if channel_name == "generalized_pauli":
        return []  # no invariant beyond the trivial identity
    if channel_name == "generalized_flip":
        return _weyl_family(dim, shift(dim), clock(dim), "shift", "clock")
    if channel_name == "generalized_phase":
        return _weyl_family(dim, clock(dim), shift(dim), "clock", "shift")
    if channel_name == "generalized_flip_phase":
        return _weyl_family(dim, shift_clock(dim), clock(dim), "flipphase", "clock")
    if channel_name == "depolarizing":
        return _depolarizing_family(dim)
    if channel_name == "dephasing":
        return _dephasing_family(dim)
    if channel_name == "amplitude_damping":
        return _amplitude_damping_family(dim)
    qubit = _qubit_rows()
    if channel_name in qubit:
        if dim != 2:
            raise ValueError(f"channel {channel_name!r} is qubit-only")
        return qubit[channel_name]
    raise KeyError(f"no curated invariants for channel {channel_name!r}")


def count_independent(channel_name: str, dim: int) -> tuple[int, int]:
    """Number of independent real invariants and the information loss.

    The loss is (dim**2 - 1) - count: how many of the real parameters that
    characterize a state cannot be transmitted error-free.
    """
    count = sum(spec.real_count for spec in curated_invariants(channel_name, dim))
    return count, (dim * dim - 1) - count
