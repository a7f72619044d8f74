"""invlab: noise-invariant observables for N-level quantum channels.

Simulates noisy channels on N-level systems, discovers and certifies the
combinations of expectation values they leave untouched, and demonstrates
the communication protocols built on those invariants (sign-encoded key
distribution with decoys, remote transfer of a measurement direction, and
an ancilla-free shift-error correcting code).
"""

__version__ = "0.1.0"

from . import channels, curated, invariants, measurement, operators, protocols, superop
from .channels import KrausChannel, apply, channel_family, validate_cptp
from .curated import count_independent, curated_invariants
from .invariants import (
    CertificationReport,
    DiscoveryResult,
    InvariantSpec,
    certify_invariant,
    discover,
    evaluate_invariant,
    match_curated,
)
from .superop import adjoint_superoperator, eigen_operators, group_by_eigenvalue

__all__ = [
    "__version__",
    "channels",
    "curated",
    "invariants",
    "measurement",
    "operators",
    "protocols",
    "superop",
    "KrausChannel",
    "apply",
    "channel_family",
    "validate_cptp",
    "count_independent",
    "curated_invariants",
    "CertificationReport",
    "DiscoveryResult",
    "InvariantSpec",
    "certify_invariant",
    "discover",
    "evaluate_invariant",
    "match_curated",
    "adjoint_superoperator",
    "eigen_operators",
    "group_by_eigenvalue",
]
