"""Noisy-channel catalog: Kraus-operator constructors, application, CPTP checks.

Channels are immutable bags of Kraus matrices. ``apply`` implements
rho -> sum_k E_k rho E_k†. Constructors cover the Weyl-generated channels
(generalized Pauli, flip, phase, flip-phase), depolarizing, dephasing and
amplitude damping for any dimension, plus the standard one-qubit catalog.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    as_rng,
    check_density_matrix,
    clock,
    dag,
    pauli_x,
    pauli_y,
    pauli_z,
    shift,
    shift_clock,
    sigma_minus,
    sigma_plus,
)

CPTP_TOL = 1e-9
PROB_SUM_TOL = 1e-12


class CptpError(ValueError):
    """Raised when a Kraus set fails the trace-preservation condition."""


@dataclass(frozen=True)
class KrausChannel:
    """A named CPTP map given by its Kraus matrices."""

    name: str
    dim: int
    kraus: tuple[np.ndarray, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("channel needs at least one Kraus operator")
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        for k in ks:
            if k.shape != (self.dim, self.dim):
                raise ValueError(f"Kraus shape {k.shape} != ({self.dim},{self.dim})")
        object.__setattr__(self, "kraus", ks)
        report = validate_cptp(self)
        if not report["ok"]:
            raise CptpError(
                f"channel {self.name!r}: sum E†E deviates from identity by "
                f"{report['max_deviation']:.3e} (tol {CPTP_TOL})"
            )


def validate_cptp(ch) -> dict:
    """Check sum_k E_k† E_k == 1 entrywise.

    Accepts a KrausChannel or a bare list of matrices; returns
    {"max_deviation": float, "ok": bool} without raising.
    """
    kraus = ch.kraus if hasattr(ch, "kraus") else ch
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    dim = kraus[0].shape[0]
    total = sum(dag(k) @ k for k in kraus)
    dev = float(np.max(np.abs(total - np.eye(dim))))
    return {"max_deviation": dev, "ok": dev <= CPTP_TOL}


def apply(ch: KrausChannel, rho: np.ndarray, *, validate: bool = True) -> np.ndarray:
    """Propagate a state through the channel: sum_k E_k rho E_k†."""
    if validate:
        rho = check_density_matrix(rho)
    else:
        rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise ValueError(f"state dim {rho.shape} does not match channel dim {ch.dim}")
    out = np.zeros_like(rho)
    for k in ch.kraus:
        out += k @ rho @ dag(k)
    return out


def _check_probs(p, n: int, what: str) -> np.ndarray:
    """Validate a probability vector of length n; silently renormalize tiny drift."""
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValueError(f"{what} must have length {n}, got shape {p.shape}")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError(f"{what} entries must lie in [0, 1]")
    s = p.sum()
    if abs(s - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"{what} must sum to 1 (got {s!r})")
    return p / s


# ---------------------------------------------------------------------------
# quNit channels
# ---------------------------------------------------------------------------

def generalized_pauli(dim: int, probs) -> KrausChannel:
    """Weyl channel: corrupt with shift**r clock**s at probability probs[r, s]."""
    probs = np.asarray(probs, dtype=float)
    p = _check_probs(probs.reshape(-1), dim * dim, "probs").reshape(dim, dim)
    x, z = shift(dim), clock(dim)
    kraus = []
    xr = np.eye(dim, dtype=complex)
    for r in range(dim):
        zs = np.eye(dim, dtype=complex)
        for s in range(dim):
            if p[r, s] > 0:
                kraus.append(np.sqrt(p[r, s]) * (xr @ zs))
            zs = zs @ z
        xr = xr @ x
    return KrausChannel("generalized_pauli", dim, tuple(kraus), {"probs": p.tolist()})


def _power_channel(name: str, dim: int, probs, unitary: np.ndarray) -> KrausChannel:
    p = _check_probs(probs, dim, "probs")
    kraus = []
    u = np.eye(dim, dtype=complex)
    for r in range(dim):
        if p[r] > 0:
            kraus.append(np.sqrt(p[r]) * u)
        u = u @ unitary
    return KrausChannel(name, dim, tuple(kraus), {"probs": p.tolist()})


def generalized_flip(dim: int, probs) -> KrausChannel:
    """Apply shift**r with probability probs[r]."""
    return _power_channel("generalized_flip", dim, probs, shift(dim))


def generalized_phase(dim: int, probs) -> KrausChannel:
    """Apply clock**r with probability probs[r]."""
    return _power_channel("generalized_phase", dim, probs, clock(dim))


def generalized_flip_phase(dim: int, probs) -> KrausChannel:
    """Apply (shift@clock)**r with probability probs[r]."""
    return _power_channel("generalized_flip_phase", dim, probs, shift_clock(dim))


def depolarizing(dim: int, p: float) -> KrausChannel:
    """Isotropic noise rho -> (1-p) rho + p 1/dim.

    Realized as the full Weyl twirl: weight 1 - p (dim²-1)/dim² on the
    identity and p/dim² on every other shift**r clock**s element. The
    contract is the affine action; the Kraus realization is internal.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength must be in [0, 1], got {p}")
    w = np.full((dim, dim), p / dim**2)
    w[0, 0] = 1.0 - p * (dim**2 - 1) / dim**2
    ch = generalized_pauli(dim, w)
    return KrausChannel("depolarizing", dim, ch.kraus, {"p": p})


def dephasing(dim: int, probs) -> KrausChannel:
    """Population-preserving channel with Kraus 1 - 2|j><j| (j < dim) and 1.

    probs has length dim+1; the last entry weights the identity. Off-diagonal
    entries scale by 1 - 2 p_i - 2 p_j, which may be negative for weights
    above 1/2 (the full simplex is accepted).
    """
    p = _check_probs(probs, dim + 1, "probs")
    kraus = []
    for j in range(dim):
        e = np.eye(dim, dtype=complex)
        e[j, j] = -1.0
        kraus.append(np.sqrt(p[j]) * e)
    kraus.append(np.sqrt(p[dim]) * np.eye(dim, dtype=complex))
    kraus = [k for k in kraus if np.any(k)]
    return KrausChannel("dephasing", dim, tuple(kraus), {"probs": p.tolist()})


def amplitude_damping(dim: int, gamma) -> KrausChannel:
    """Population decay with rate gamma[n, m] from level n to level m < n.

    gamma is a strictly-lower-triangular dim x dim array (entries for m >= n
    must be zero). Requires xi_n = sum_m gamma[n, m] <= 1 for every n.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (dim, dim):
        raise ValueError(f"gamma must be {dim}x{dim}, got {gamma.shape}")
    if np.any(np.triu(gamma) != 0):
        raise ValueError("gamma must be strictly lower triangular")
    if np.any(gamma < 0) or np.any(gamma > 1):
        raise ValueError("rates must lie in [0, 1]")
    xi = gamma.sum(axis=1)
    if np.any(xi > 1 + PROB_SUM_TOL):
        raise ValueError(f"total decay rate out of a level exceeds 1: xi = {xi}")
    e0 = np.eye(dim, dtype=complex)
    for n in range(1, dim):
        e0[n, n] = np.sqrt(max(0.0, 1.0 - xi[n]))
    kraus = [e0]
    for n in range(1, dim):
        for m in range(n):
            if gamma[n, m] > 0:
                e = np.zeros((dim, dim), dtype=complex)
                e[m, n] = np.sqrt(gamma[n, m])
                kraus.append(e)
    return KrausChannel("amplitude_damping", dim, tuple(kraus), {"gamma": gamma.tolist()})


# ---------------------------------------------------------------------------
# One-qubit catalog
# ---------------------------------------------------------------------------

def _check_unit_interval(value: float, what: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{what} must be in [0, 1], got {value}")
    return value


def _flip_like(name: str, p: float, sigma: np.ndarray) -> KrausChannel:
    p = _check_unit_interval(p, "p")
    kraus = [np.sqrt(1 - p) * np.eye(2, dtype=complex), np.sqrt(p) * sigma]
    kraus = [k for k in kraus if np.any(k)]
    return KrausChannel(name, 2, tuple(kraus), {"p": p})


def bit_flip(p: float) -> KrausChannel:
    return _flip_like("bit_flip", p, pauli_x())


def phase_flip(p: float) -> KrausChannel:
    return _flip_like("phase_flip", p, pauli_z())


def bit_phase_flip(p: float) -> KrausChannel:
    return _flip_like("bit_phase_flip", p, pauli_y())


def depolarizing_qubit(p: float) -> KrausChannel:
    """Qubit depolarizing with Kraus weights (1 - 3p/4, p/4, p/4, p/4)."""
    p = _check_unit_interval(p, "p")
    eye = np.eye(2, dtype=complex)
    kraus = [np.sqrt(1 - 0.75 * p) * eye]
    for s in (pauli_x(), pauli_y(), pauli_z()):
        if p > 0:
            kraus.append(np.sqrt(p / 4) * s)
    return KrausChannel("depolarizing_qubit", 2, tuple(kraus), {"p": p})


def adc_qubit(q: float) -> KrausChannel:
    """Qubit amplitude damping: decay |1> -> |0> at rate q."""
    q = _check_unit_interval(q, "q")
    e0 = 0.5 * ((1 + np.sqrt(1 - q)) * np.eye(2, dtype=complex)
                + (1 - np.sqrt(1 - q)) * pauli_z())
    kraus = [e0]
    if q > 0:
        kraus.append(np.sqrt(q) * sigma_plus() / 2)
    return KrausChannel("adc_qubit", 2, tuple(kraus), {"q": q})


def gadc_qubit(q: float, p1: float) -> KrausChannel:
    """Generalized amplitude damping: decay and pumping with weights p1, p2 = 1 - p1."""
    q = _check_unit_interval(q, "q")
    p1 = _check_unit_interval(p1, "p1")
    p2 = 1.0 - p1
    eye = np.eye(2, dtype=complex)
    root = np.sqrt(1 - q)
    k1 = 0.5 * np.sqrt(p1) * ((1 + root) * eye + (1 - root) * pauli_z())
    k2 = 0.5 * np.sqrt(p1 * q) * sigma_plus()
    k3 = 0.5 * np.sqrt(p2) * ((1 + root) * eye - (1 - root) * pauli_z())
    k4 = 0.5 * np.sqrt(p2 * q) * sigma_minus()
    kraus = tuple(k for k in (k1, k2, k3, k4) if np.any(k))
    return KrausChannel("gadc_qubit", 2, kraus, {"q": q, "p1": p1, "p2": p2})


# ---------------------------------------------------------------------------
# Parameterized families (for sampling in certification and discovery)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelFamily:
    """A named channel constructor together with a random parameter sampler.

    Samplers keep parameters away from boundary values so the resulting
    eigenvalue structure is generic (degenerate parameters collapse the
    invariant-family structure).
    """

    name: str
    dim: int
    param_spec: tuple[tuple[str, str], ...]
    _sampler: callable
    _builder: callable

    def sample(self, seed) -> KrausChannel:
        return self._sampler(self.dim, as_rng(seed))

    def build(self, **params) -> KrausChannel:
        return self._builder(self.dim, **params)


def _interior_prob_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    # Normalized draws from [0.5, 1.5]: every component stays >= 1/(3n).
    u = rng.uniform(0.5, 1.5, size=n)
    return u / u.sum()


def _interior_scalar(rng: np.random.Generator) -> float:
    return float(rng.uniform(0.05, 0.95))


def _sample_gamma(dim: int, rng: np.random.Generator) -> np.ndarray:
    gamma = np.zeros((dim, dim))
    for n in range(1, dim):
        xi = _interior_scalar(rng)
        gamma[n, :n] = xi * _interior_prob_vector(rng, n)
    return gamma


_QUNIT_SAMPLERS = {
    "generalized_pauli": lambda d, rng: generalized_pauli(d, _interior_prob_vector(rng, d * d).reshape(d, d)),
    "generalized_flip": lambda d, rng: generalized_flip(d, _interior_prob_vector(rng, d)),
    "generalized_phase": lambda d, rng: generalized_phase(d, _interior_prob_vector(rng, d)),
    "generalized_flip_phase": lambda d, rng: generalized_flip_phase(d, _interior_prob_vector(rng, d)),
    "depolarizing": lambda d, rng: depolarizing(d, _interior_scalar(rng)),
    "dephasing": lambda d, rng: dephasing(d, _interior_prob_vector(rng, d + 1)),
    "amplitude_damping": lambda d, rng: amplitude_damping(d, _sample_gamma(d, rng)),
}

_QUNIT_BUILDERS = {
    "generalized_pauli": lambda d, probs: generalized_pauli(d, probs),
    "generalized_flip": lambda d, probs: generalized_flip(d, probs),
    "generalized_phase": lambda d, probs: generalized_phase(d, probs),
    "generalized_flip_phase": lambda d, probs: generalized_flip_phase(d, probs),
    "depolarizing": lambda d, p: depolarizing(d, p),
    "dephasing": lambda d, probs: dephasing(d, probs),
    "amplitude_damping": lambda d, gamma: amplitude_damping(d, gamma),
}

_QUNIT_PARAM_SPEC = {
    "generalized_pauli": (("probs", "dim*dim simplex"),),
    "generalized_flip": (("probs", "length-dim simplex"),),
    "generalized_phase": (("probs", "length-dim simplex"),),
    "generalized_flip_phase": (("probs", "length-dim simplex"),),
    "depolarizing": (("p", "[0, 1]"),),
    "dephasing": (("probs", "length-(dim+1) simplex"),),
    "amplitude_damping": (("gamma", "strictly lower-triangular rates, row sums <= 1"),),
}

_QUBIT_SAMPLERS = {
    "bit_flip": lambda d, rng: bit_flip(_interior_scalar(rng)),
    "phase_flip": lambda d, rng: phase_flip(_interior_scalar(rng)),
    "bit_phase_flip": lambda d, rng: bit_phase_flip(_interior_scalar(rng)),
    "depolarizing_qubit": lambda d, rng: depolarizing_qubit(_interior_scalar(rng)),
    "adc_qubit": lambda d, rng: adc_qubit(_interior_scalar(rng)),
    "gadc_qubit": lambda d, rng: gadc_qubit(_interior_scalar(rng), _interior_scalar(rng)),
}

_QUBIT_BUILDERS = {
    "bit_flip": lambda d, p: bit_flip(p),
    "phase_flip": lambda d, p: phase_flip(p),
    "bit_phase_flip": lambda d, p: bit_phase_flip(p),
    "depolarizing_qubit": lambda d, p: depolarizing_qubit(p),
    "adc_qubit": lambda d, q: adc_qubit(q),
    "gadc_qubit": lambda d, q, p1: gadc_qubit(q, p1),
}

_QUBIT_PARAM_SPEC = {
    "bit_flip": (("p", "[0, 1]"),),
    "phase_flip": (("p", "[0, 1]"),),
    "bit_phase_flip": (("p", "[0, 1]"),),
    "depolarizing_qubit": (("p", "[0, 1]"),),
    "adc_qubit": (("q", "[0, 1]"),),
    "gadc_qubit": (("q", "[0, 1]"), ("p1", "[0, 1]")),
}

QUNIT_CHANNELS = tuple(sorted(_QUNIT_SAMPLERS))
QUBIT_CHANNELS = tuple(sorted(_QUBIT_SAMPLERS))
CHANNEL_NAMES = QUNIT_CHANNELS + QUBIT_CHANNELS


def channel_family(name: str, dim: int) -> ChannelFamily:
    """Look up a catalog channel by name, bound to a dimension."""
    if name in _QUNIT_SAMPLERS:
        if dim < 2:
            raise ValueError(f"dimension must be >= 2, got {dim}")
        return ChannelFamily(name, dim, _QUNIT_PARAM_SPEC[name],
                             _QUNIT_SAMPLERS[name], _QUNIT_BUILDERS[name])
    if name in _QUBIT_SAMPLERS:
        if dim != 2:
            raise ValueError(f"channel {name!r} is qubit-only (dim 2), got dim {dim}")
        return ChannelFamily(name, 2, _QUBIT_PARAM_SPEC[name],
                             _QUBIT_SAMPLERS[name], _QUBIT_BUILDERS[name])
    raise KeyError(f"unknown channel {name!r}; known: {', '.join(CHANNEL_NAMES)}")


# ---------------------------------------------------------------------------
# JSON channel definitions
# ---------------------------------------------------------------------------

def matrix_to_json(mat: np.ndarray) -> list:
    """Row-major nested lists with complex entries as [re, im] pairs."""
    mat = np.asarray(mat, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def matrix_from_json(data, dim: int | None = None) -> np.ndarray:
    mat = np.asarray(data, dtype=float)
    if mat.ndim != 3 or mat.shape[2] != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix JSON must be a square nested list of [re, im] pairs")
    if dim is not None and mat.shape[0] != dim:
        raise ValueError(f"matrix dim {mat.shape[0]} != declared dim {dim}")
    return mat[..., 0] + 1j * mat[..., 1]


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "name": ch.name,
        "dim": ch.dim,
        "kraus": [matrix_to_json(k) for k in ch.kraus],
        "params": ch.params,
    }


def channel_from_json(doc: dict) -> KrausChannel:
    """Parse a channel definition document; rejects non-CPTP Kraus sets."""
    for key in ("name", "dim", "kraus"):
        if key not in doc:
            raise ValueError(f"channel definition missing {key!r}")
    dim = int(doc["dim"])
    kraus = tuple(matrix_from_json(k, dim) for k in doc["kraus"])
    return KrausChannel(str(doc["name"]), dim, kraus, dict(doc.get("params", {})))
