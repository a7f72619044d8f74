"""Heisenberg-picture superoperator of a channel and its eigenoperators.

The adjoint map O -> sum_k E_k† O E_k is represented as a dim² x dim²
matrix under column-stacking vectorization. Its eigenoperators are the
observables whose expectation values simply rescale under the channel,
which is the raw material for every invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel
from .operators import dag

EIGEN_RESIDUAL_TOL = 1e-8
DEFECT_TOL = 1e-6
GROUP_RTOL = 1e-8


def vec(op: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(op, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape(dim, dim, order="F")


def apply_adjoint(ch: KrausChannel, op: np.ndarray) -> np.ndarray:
    """Direct Heisenberg action sum_k E_k† O E_k."""
    op = np.asarray(op, dtype=complex)
    out = np.zeros_like(op)
    for k in ch.kraus:
        out += dag(k) @ op @ k
    return out


@dataclass(frozen=True)
class Superoperator:
    """Matrix form of the Heisenberg map of a channel."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        n2 = self.dim * self.dim
        if self.mat.shape != (n2, n2):
            raise ValueError(f"superoperator must be {n2}x{n2}, got {self.mat.shape}")
        # Trace preservation of the channel makes the Heisenberg map unital.
        eye = np.eye(self.dim, dtype=complex)
        drift = np.max(np.abs(self.mat @ vec(eye) - vec(eye)))
        if drift > 1e-10:
            raise ValueError(f"Heisenberg map is not unital (identity drifts by {drift:.3e})")

    def __call__(self, op: np.ndarray) -> np.ndarray:
        return unvec(self.mat @ vec(op))


def adjoint_superoperator(ch: KrausChannel) -> Superoperator:
    """Assemble the Heisenberg-map matrix column by column from matrix units.

    Column j holds the vectorized image of the j-th matrix unit, so the
    construction is convention-proof by definition of the vectorization.
    """
    n = ch.dim
    mat = np.empty((n * n, n * n), dtype=complex)
    unit = np.zeros((n, n), dtype=complex)
    for j in range(n * n):
        unit.reshape(-1, order="F")[j] = 1.0
        mat[:, j] = vec(apply_adjoint(ch, unit))
        unit.reshape(-1, order="F")[j] = 0.0
    return Superoperator(n, mat)


@dataclass(frozen=True)
class EigenOperator:
    """An operator that rescales by `eigenvalue` under the Heisenberg map."""

    op: np.ndarray
    eigenvalue: complex
    residual: float
    group_id: int = -1


@dataclass(frozen=True)
class EigenGroup:
    """Eigenoperators sharing one eigenvalue (within the grouping tolerance)."""

    group_id: int
    eigenvalue: complex
    members: tuple[EigenOperator, ...]

    @property
    def dim(self) -> int:
        return len(self.members)


def eigen_operators(sop: Superoperator, tol: float = EIGEN_RESIDUAL_TOL
                    ) -> tuple[list[EigenOperator], bool]:
    """Full eigendecomposition of the (non-Hermitian) Heisenberg matrix.

    Returns (eigenoperators, defect_warning). Eigenvectors are unvectorized
    to unit Hilbert-Schmidt norm. If the eigenvector set is numerically
    rank-deficient (a defective or near-defective map), only a maximal
    well-conditioned subset is returned and the warning flag is set.
    """
    evals, evecs = np.linalg.eig(sop.mat)
    order = np.lexsort((np.angle(evals), -np.abs(evals)))
    out: list[EigenOperator] = []
    kept_basis: list[np.ndarray] = []
    defect = False
    for idx in order:
        v = evecs[:, idx]
        v = v / np.linalg.norm(v)
        resid = float(np.linalg.norm(sop.mat @ v - evals[idx] * v))
        if resid > tol:
            defect = True
            continue
        # Guard against (near-)defective maps: eig can return nearly
        # parallel vectors for a repeated eigenvalue.
        u = v.copy()
        for b in kept_basis:
            u -= (b.conj() @ u) * b
        if np.linalg.norm(u) < DEFECT_TOL:
            defect = True
            continue
        kept_basis.append(u / np.linalg.norm(u))
        out.append(EigenOperator(op=unvec(v), eigenvalue=complex(evals[idx]), residual=resid))
    return out, defect


def group_by_eigenvalue(eigs: list[EigenOperator], rel_tol: float = GROUP_RTOL
                        ) -> list[EigenGroup]:
    """Partition eigenoperators into equal-eigenvalue classes.

    Two eigenvalues are merged when |a - b| <= rel_tol * max(|a|, |b|, 1e-12).
    Groups come back sorted by |eigenvalue| descending.
    """
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            a, b = eigs[i].eigenvalue, eigs[j].eigenvalue
            if abs(a - b) <= rel_tol * max(abs(a), abs(b), 1e-12):
                parent[find(i)] = find(j)

    clusters: dict[int, list[EigenOperator]] = {}
    for i, e in enumerate(eigs):
        clusters.setdefault(find(i), []).append(e)

    groups = []
    for members in clusters.values():
        lam = complex(np.mean([m.eigenvalue for m in members]))
        groups.append((lam, members))
    groups.sort(key=lambda t: (-abs(t[0]), -np.angle(t[0])))

    out = []
    for gid, (lam, members) in enumerate(groups):
        tagged = tuple(
            EigenOperator(op=m.op, eigenvalue=m.eigenvalue, residual=m.residual, group_id=gid)
            for m in members
        )
        out.append(EigenGroup(group_id=gid, eigenvalue=lam, members=tagged))
    return out
