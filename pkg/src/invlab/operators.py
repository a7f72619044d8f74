"""Dense operator algebra for N-level systems.

Everything here works on plain complex numpy arrays. States are density
matrices (trace one, Hermitian, positive semidefinite); operators are
arbitrary square complex matrices. Constructors cover the Weyl-Heisenberg
shift/clock pair, the Hermitian coherence/population basis, qubit Paulis
and random state generation. All functions are pure; RNG state is passed
in explicitly.
"""

from __future__ import annotations

import numpy as np

# Tolerance hierarchy: exact construction / algebraic identities at 1e-12,
# spectral checks at 1e-10. Dimensions stay small (N <= ~8) so double
# precision leaves ample headroom.
CONSTRUCTION_TOL = 1e-12
SPECTRAL_TOL = 1e-10


def as_rng(seed) -> np.random.Generator:
    """Coerce an int seed (or an existing Generator) to a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Deterministic child generator for (master seed, stream key).

    Distinct keys give statistically independent streams; the same
    (seed, key) pair always yields the same sequence.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def _check_dim(dim: int) -> int:
    dim = int(dim)
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    return dim


def _check_square(op: np.ndarray, name: str = "operator") -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {op.shape}")
    return op


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def dag(op: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(op).conj().T


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(a† b)."""
    return complex(np.trace(dag(a) @ b))


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(a))


def is_hermitian(op: np.ndarray, tol: float = SPECTRAL_TOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - dag(op))) <= tol)


# ---------------------------------------------------------------------------
# Weyl-Heisenberg (generalized Pauli) operators
# ---------------------------------------------------------------------------

def shift(dim: int) -> np.ndarray:
    """Cyclic shift matrix: maps |k> to |k+1 mod dim>. Unitary, shift**dim = 1."""
    dim = _check_dim(dim)
    op = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        op[(k + 1) % dim, k] = 1.0
    return op


def clock(dim: int) -> np.ndarray:
    """Phase matrix diag(w**k) with w = exp(2*pi*i/dim). Unitary, clock**dim = 1."""
    dim = _check_dim(dim)
    w = np.exp(2j * np.pi / dim)
    return np.diag(w ** np.arange(dim))


def shift_clock(dim: int) -> np.ndarray:
    """Product shift(dim) @ clock(dim), the combined flip-and-phase generator."""
    return shift(dim) @ clock(dim)


def weyl(dim: int, r: int, s: int) -> np.ndarray:
    """Weyl element shift**r @ clock**s."""
    dim = _check_dim(dim)
    return np.linalg.matrix_power(shift(dim), r % dim) @ np.linalg.matrix_power(clock(dim), s % dim)


# ---------------------------------------------------------------------------
# Hermitian operator basis: coherences and populations
# ---------------------------------------------------------------------------

def _check_pair(dim: int, k: int, l: int) -> None:
    if not (0 <= l < dim and 0 <= k < dim):
        raise ValueError(f"indices ({k},{l}) out of range for dim {dim}")
    if k == l:
        raise ValueError("indices must differ")


def coherence_real(dim: int, k: int, l: int) -> np.ndarray:
    """|k><l| + |l><k|: the real part of the (k,l) coherence. Hermitian, traceless."""
    dim = _check_dim(dim)
    _check_pair(dim, k, l)
    op = np.zeros((dim, dim), dtype=complex)
    op[k, l] = 1.0
    op[l, k] = 1.0
    return op


def coherence_imag(dim: int, k: int, l: int) -> np.ndarray:
    """-i(|k><l| - |l><k|): the imaginary part of the (k,l) coherence. Hermitian, traceless."""
    dim = _check_dim(dim)
    _check_pair(dim, k, l)
    op = np.zeros((dim, dim), dtype=complex)
    op[k, l] = -1.0j
    op[l, k] = 1.0j
    return op


def level_projector(dim: int, k: int) -> np.ndarray:
    """Projector |k><k| onto a single level."""
    dim = _check_dim(dim)
    if not 0 <= k < dim:
        raise ValueError(f"level {k} out of range for dim {dim}")
    op = np.zeros((dim, dim), dtype=complex)
    op[k, k] = 1.0
    return op


def population_difference(dim: int, k: int, l: int) -> np.ndarray:
    """|k><k| - |l><l|, the population imbalance between two levels."""
    _check_pair(_check_dim(dim), k, l)
    return level_projector(dim, k) - level_projector(dim, l)


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Full Hermitian operator basis of the dim**2-dimensional operator space.

    Consists of all real/imaginary coherences for k > l plus the level
    projectors; spans every dim x dim matrix over the complex field.
    """
    dim = _check_dim(dim)
    basis = []
    for k in range(dim):
        for l in range(k):
            basis.append(coherence_real(dim, k, l))
            basis.append(coherence_imag(dim, k, l))
    for k in range(dim):
        basis.append(level_projector(dim, k))
    return basis


# ---------------------------------------------------------------------------
# Qubit shorthands
# ---------------------------------------------------------------------------

def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=complex)


def pauli_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=complex)


def pauli_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=complex)


def sigma_plus() -> np.ndarray:
    """sigma_x + i sigma_y = 2|0><1|."""
    return pauli_x() + 1j * pauli_y()


def sigma_minus() -> np.ndarray:
    """sigma_x - i sigma_y = 2|1><0|."""
    return pauli_x() - 1j * pauli_y()


def bloch_state(nx: float, ny: float, nz: float) -> np.ndarray:
    """Qubit density matrix (1 + n . sigma)/2; requires |n| <= 1."""
    n = np.array([nx, ny, nz], dtype=float)
    if np.linalg.norm(n) > 1 + 1e-12:
        raise ValueError("Bloch vector must have norm <= 1")
    return 0.5 * (np.eye(2, dtype=complex) + nx * pauli_x() + ny * pauli_y() + nz * pauli_z())


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def check_density_matrix(rho: np.ndarray, *, trace_tol: float = CONSTRUCTION_TOL,
                         herm_tol: float = CONSTRUCTION_TOL,
                         psd_tol: float = SPECTRAL_TOL) -> np.ndarray:
    """Validate a density matrix; returns it as a complex array or raises ValueError."""
    rho = _check_square(rho, "state")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"state trace {tr} is not 1 within {trace_tol}")
    if np.max(np.abs(rho - dag(rho))) > herm_tol:
        raise ValueError("state is not Hermitian")
    evals = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))
    if evals.min() < -psd_tol:
        raise ValueError(f"state has negative eigenvalue {evals.min():.3e}")
    return rho


def random_pure_state(dim: int, seed) -> np.ndarray:
    """Haar-random pure state |psi><psi| from a normalized complex Gaussian vector."""
    dim = _check_dim(dim)
    rng = as_rng(seed)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    vec /= np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


def random_mixed_state(dim: int, seed) -> np.ndarray:
    """Full-rank random mixed state G G† / Tr(G G†) with G complex Gaussian (Ginibre)."""
    dim = _check_dim(dim)
    rng = as_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# Expectation values
# ---------------------------------------------------------------------------

def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """Tr(op @ rho). Complex in general; real up to rounding for Hermitian op."""
    rho = np.asarray(rho, dtype=complex)
    op = _check_square(op)
    _check_same_dim(rho, op)
    return complex(np.trace(op @ rho))


def hermitian_parts(op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split op = H1 + i H2 with H1, H2 Hermitian.

    H1 = (op + op†)/2, H2 = (op - op†)/(2i). Measuring both recovers the
    complex expectation value of a non-Hermitian operator.
    """
    op = _check_square(op)
    h1 = 0.5 * (op + dag(op))
    h2 = (op - dag(op)) / 2j
    return h1, h2
