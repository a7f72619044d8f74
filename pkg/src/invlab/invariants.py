"""Discovery, evaluation and certification of noise-invariant quantities.

An invariant is a product prod_a <O_a>^(r_a) of expectation values whose
rescaling factors cancel under the Heisenberg action of a channel. Three
kinds appear:

* family1   - a single operator with eigenvalue 1 (its expectation value
              is untouched by the noise),
* family2   - a ratio of two operators rescaling by the same factor,
* family3   - a longer product whose eigenvalue product equals 1 without
              being a combination of the first two kinds.

Discovery eigendecomposes the Heisenberg superoperator, groups equal
eigenvalues and scans integer exponent vectors over the groups, pruning
anything congruent to already-accepted relations over the integer
exponent lattice. Certification re-tests candidate invariants at fresh
parameter draws, so relations holding only at a single noise point are
rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channels import ChannelFamily, KrausChannel, apply
from .operators import expectation, random_mixed_state, substream
from .superop import (
    EigenGroup,
    adjoint_superoperator,
    eigen_operators,
    group_by_eigenvalue,
    vec,
)

FAMILY1 = "family1"
FAMILY2 = "family2"
FAMILY3 = "family3"

PRODUCT_TOL = 1e-8          # |prod lambda^r - 1| for accepting a relation
ZERO_EIGENVALUE_TOL = 1e-10  # eigenvalues below this carry no usable signal
UNDERFLOW_TOL = 1e-10        # evaluation refuses smaller denominators
SKIP_FLOOR = 1e-6            # certification skips states with smaller factors
CERT_TOL = 1e-7
MEMBERSHIP_TOL = 1e-6        # operator-in-eigenspace projection residual


class DenominatorUnderflow(ArithmeticError):
    """An inverse-power factor vanished: the state carries no signal here."""


@dataclass(frozen=True)
class InvariantSpec:
    """A concrete invariant: operators with integer exponents."""

    kind: str
    operators: tuple[np.ndarray, ...]
    exponents: tuple[int, ...]
    label: str
    provenance: str = "discovered"
    real_count: int = 1  # independent real numbers this quantity carries

    def __post_init__(self):
        if len(self.operators) != len(self.exponents):
            raise ValueError("one exponent per operator required")
        object.__setattr__(self, "operators",
                           tuple(np.asarray(o, dtype=complex) for o in self.operators))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))


def evaluate_invariant(inv: InvariantSpec, rho: np.ndarray) -> complex:
    """prod_a <O_a>^(r_a) on a state; complex in general."""
    value = 1.0 + 0.0j
    for op, r in zip(inv.operators, inv.exponents):
        ev = expectation(rho, op)
        if r < 0 and abs(ev) < UNDERFLOW_TOL:
            raise DenominatorUnderflow(
                f"{inv.label}: |<O>| = {abs(ev):.2e} below {UNDERFLOW_TOL}")
        value *= ev ** r
    return value


def invariant_drift(inv: InvariantSpec, rho_before: np.ndarray, rho_after: np.ndarray,
                    floor: float = SKIP_FLOOR) -> float | None:
    """Relative drift |prod (<O>_after / <O>_before)^r - 1|.

    Returns None when any participating factor is smaller than `floor` on
    either side (the state is information-free for this invariant and the
    quotient would amplify rounding noise).
    """
    ratio = 1.0 + 0.0j
    for op, r in zip(inv.operators, inv.exponents):
        if r == 0:
            continue
        a = expectation(rho_before, op)
        b = expectation(rho_after, op)
        if min(abs(a), abs(b)) < floor:
            return None
        ratio *= (b / a) ** r
    return abs(ratio - 1.0)


# ---------------------------------------------------------------------------
# Integer lattice of accepted exponent relations
# ---------------------------------------------------------------------------

class ExponentLattice:
    """Integer lattice spanned by accepted exponent vectors.

    Kept in leading-column echelon form via extended-Euclid row combinations,
    which makes exact membership tests (is a candidate an integer combination
    of accepted relations?) a greedy reduction.
    """

    def __init__(self, n: int):
        self.n = n
        self.rows: list[list[int]] = []  # sorted by leading index, leading entry > 0

    @staticmethod
    def _leading(v: list[int]) -> int | None:
        for i, x in enumerate(v):
            if x != 0:
                return i
        return None

    def add(self, vector) -> None:
        v = [int(x) for x in vector]
        if len(v) != self.n:
            raise ValueError("vector length mismatch")
        while True:
            lead = self._leading(v)
            if lead is None:
                return
            row = next((r for r in self.rows if self._leading(r) == lead), None)
            if row is None:
                if v[lead] < 0:
                    v = [-x for x in v]
                self.rows.append(v)
                self.rows.sort(key=lambda r: self._leading(r))
                return
            # Combine so the stored row's leading entry becomes gcd(old, new)
            # and the candidate's leading entry becomes zero; both operations
            # are unimodular so the lattice is unchanged.
            a, b = row[lead], v[lead]
            g, x, y = _ext_gcd(a, b)
            new_row = [x * ra + y * va for ra, va in zip(row, v)]
            new_v = [(a // g) * va - (b // g) * ra for ra, va in zip(row, v)]
            self.rows[self.rows.index(row)] = new_row
            v = new_v

    def contains(self, vector) -> bool:
        v = [int(x) for x in vector]
        while True:
            lead = self._leading(v)
            if lead is None:
                return True
            row = next((r for r in self.rows if self._leading(r) == lead), None)
            if row is None or v[lead] % row[lead] != 0:
                return False
            q = v[lead] // row[lead]
            v = [x - q * r for x, r in zip(v, row)]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with a*x + b*y = g = gcd(a, b), g > 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Discovery
# ---------------------------------------------------------------------------

@dataclass
class DiscoveryResult:
    channel: KrausChannel
    groups: list[EigenGroup]
    unit_group_id: int | None
    family1: list[InvariantSpec]
    family2: list[InvariantSpec]
    family3: list[InvariantSpec]
    lattice: ExponentLattice
    defect_warning: bool
    truncated: bool

    @property
    def invariants(self) -> list[InvariantSpec]:
        return [*self.family1, *self.family2, *self.family3]

    @property
    def trivial(self) -> bool:
        """True when nothing beyond the identity direction was found."""
        return not self.invariants


def _unit_group_id(groups: list[EigenGroup], tol: float) -> int | None:
    for g in groups:
        if abs(g.eigenvalue - 1.0) <= tol:
            return g.group_id
    return None


def _family1_basis(group: EigenGroup, dim: int) -> list[np.ndarray]:
    """Orthonormal basis of the fixed-point space with the identity removed."""
    ident = vec(np.eye(dim, dtype=complex)) / np.sqrt(dim)
    cols = []
    for m in group.members:
        v = vec(m.op)
        v = v - (ident.conj() @ v) * ident
        cols.append(v)
    if not cols:
        return []
    mat = np.column_stack(cols)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    return [u[:, i].reshape(dim, dim, order="F") for i in range(len(s)) if s[i] > 1e-7]


def discover(ch: KrausChannel, *, max_exponent: int = 3, max_support: int = 3,
             group_rtol: float = 1e-8, product_tol: float = PRODUCT_TOL,
             budget: int = 2_000_000, curated_ops: list[np.ndarray] | None = None,
             ) -> DiscoveryResult:
    """Find the channel's invariants from its Heisenberg eigenstructure.

    The family-3 scan runs over one representative per eigenvalue group
    (within-group exponent shuffles are family-2 moves and carry nothing
    new) with |exponent| <= max_exponent and at most max_support groups
    participating. `budget` caps the number of scanned exponent vectors;
    hitting it sets the `truncated` flag on the result.
    """
    sop = adjoint_superoperator(ch)
    eigs, defect = eigen_operators(sop)
    groups = group_by_eigenvalue(eigs, group_rtol)
    unit_id = _unit_group_id(groups, max(group_rtol, 1e-8))

    family1: list[InvariantSpec] = []
    if unit_id is not None:
        for i, op in enumerate(_family1_basis(groups[unit_id], ch.dim)):
            family1.append(InvariantSpec(
                kind=FAMILY1, operators=(op,), exponents=(1,),
                label=f"fixed[{i}]", provenance="discovered"))

    family2: list[InvariantSpec] = []
    for g in groups:
        if g.group_id == unit_id or abs(g.eigenvalue) <= ZERO_EIGENVALUE_TOL or g.dim < 2:
            continue
        ref = 0
        if curated_ops:
            overlaps = [
                max(abs(np.vdot(vec(c), vec(m.op))) for c in curated_ops)
                for m in g.members
            ]
            ref = int(np.argmax(overlaps))
        for i, m in enumerate(g.members):
            if i == ref:
                continue
            family2.append(InvariantSpec(
                kind=FAMILY2, operators=(m.op, g.members[ref].op), exponents=(1, -1),
                label=f"ratio[g{g.group_id}:{i}/{ref}]", provenance="discovered"))

    # Family-3 scan over group representatives. The lattice starts with the
    # unit group's axis: multiplying by a fixed-point expectation (or by the
    # trivial <1>) never yields a new relation.
    n_groups = len(groups)
    lattice = ExponentLattice(n_groups)
    if unit_id is not None:
        seed_vec = [0] * n_groups
        seed_vec[unit_id] = 1
        lattice.add(seed_vec)

    nodes = [g.group_id for g in groups
             if abs(g.eigenvalue) > ZERO_EIGENVALUE_TOL and g.group_id != unit_id]
    lams = {g.group_id: g.eigenvalue for g in groups}
    exps = [e for e in range(-max_exponent, max_exponent + 1) if e != 0]

    family3: list[InvariantSpec] = []
    truncated = False
    scanned = 0
    for support in range(1, max_support + 1):
        if truncated:
            break
        for combo in itertools.combinations(nodes, support):
            n_cand = len(exps) ** support
            if scanned + n_cand > budget:
                truncated = True
                break
            scanned += n_cand
            # All exponent assignments for this support set at once.
            grids = np.meshgrid(*([np.array(exps)] * support), indexing="ij")
            evec = np.stack([g.reshape(-1) for g in grids], axis=1)
            prod = np.ones(evec.shape[0], dtype=complex)
            for col, gid in enumerate(combo):
                prod *= lams[gid] ** evec[:, col]
            hits = np.nonzero(np.abs(prod - 1.0) <= product_tol)[0]
            for h in hits:
                full = [0] * n_groups
                for col, gid in enumerate(combo):
                    full[gid] = int(evec[h, col])
                if full[next(i for i in range(n_groups) if full[i] != 0)] < 0:
                    full = [-x for x in full]
                if lattice.contains(full):
                    continue
                lattice.add(full)
                ops, rs, parts = [], [], []
                for gid in combo:
                    r = full[gid]
                    if r == 0:
                        continue
                    ops.append(groups[gid].members[0].op)
                    rs.append(r)
                    parts.append(f"g{gid}^{r}")
                family3.append(InvariantSpec(
                    kind=FAMILY3, operators=tuple(ops), exponents=tuple(rs),
                    label="product[" + " ".join(parts) + "]", provenance="discovered"))

    return DiscoveryResult(
        channel=ch, groups=groups, unit_group_id=unit_id,
        family1=family1, family2=family2, family3=family3,
        lattice=lattice, defect_warning=defect, truncated=truncated)


# ---------------------------------------------------------------------------
# Certification across parameter draws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CertificationReport:
    label: str
    kind: str
    draws: int
    states: int
    tol: float
    max_rel_drift: float
    certified: bool
    skipped_states: int
    evaluations: int
    inconclusive: bool


def certify_invariant(family: ChannelFamily, inv: InvariantSpec, *,
                      draws: int = 5, states: int = 20, tol: float = CERT_TOL,
                      seed: int = 0) -> CertificationReport:
    """Evaluate the invariant before/after the channel at fresh parameter draws.

    Certification holds only if the relation is an identity in the noise
    parameters: a relation tuned to a single parameter point drifts at the
    other draws and fails. Per-cell RNG substreams make the grid order
    independent of evaluation order.
    """
    max_drift = 0.0
    skipped = 0
    evaluated = 0
    for k in range(draws):
        ch = family.sample(substream(seed, 0, k))
        for t in range(states):
            rho = random_mixed_state(family.dim, substream(seed, 1, k, t))
            rho_out = apply(ch, rho, validate=False)
            drift = invariant_drift(inv, rho, rho_out)
            if drift is None:
                skipped += 1
                continue
            evaluated += 1
            max_drift = max(max_drift, drift)
    inconclusive = evaluated == 0
    return CertificationReport(
        label=inv.label, kind=inv.kind, draws=draws, states=states, tol=tol,
        max_rel_drift=max_drift, certified=(not inconclusive and max_drift <= tol),
        skipped_states=skipped, evaluations=evaluated, inconclusive=inconclusive)


# ---------------------------------------------------------------------------
# Matching curated invariants against discovery output
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchReport:
    curated_label: str
    matched: bool
    reason: str
    max_value_deviation: float


def _containing_group(op: np.ndarray, groups: list[EigenGroup]
                      ) -> tuple[int | None, np.ndarray | None]:
    """Locate the eigenvalue group whose span holds `op`.

    Returns (group_id, reconstruction) or (None, None). Eigenspaces of a
    diagonalizable map are linearly independent, so at most one group fits.
    """
    target = vec(op)
    nrm = np.linalg.norm(target)
    for g in groups:
        basis = np.column_stack([vec(m.op) for m in g.members])
        coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
        resid = np.linalg.norm(basis @ coef - target)
        if resid <= MEMBERSHIP_TOL * nrm:
            # reshape order matches the column-stacking vec convention
            recon = (basis @ coef).reshape(op.shape, order="F")
            return g.group_id, recon
    return None, None


def match_curated(disc: DiscoveryResult, curated: list[InvariantSpec], *,
                  seed: int = 0, states: int = 20, tol: float = 1e-8
                  ) -> list[MatchReport]:
    """Check that each curated invariant is reproduced by the discovery output.

    A curated invariant matches when every one of its operators lies in a
    discovered eigenvalue group (so it is a basis change of discovered
    eigenoperators), its group-exponent signature is consistent with the
    discovered relation lattice, and evaluating it against its eigenbasis
    reconstruction agrees on random states.
    """
    dim = disc.channel.dim
    lams = {g.group_id: g.eigenvalue for g in disc.groups}
    dims = {g.group_id: g.dim for g in disc.groups}
    test_states = [random_mixed_state(dim, substream(seed, 7, t)) for t in range(states)]
    out = []
    for inv in curated:
        located = [_containing_group(op, disc.groups) for op in inv.operators]
        if any(gid is None for gid, _ in located):
            out.append(MatchReport(inv.label, False, "operator not in any eigenspace", np.inf))
            continue

        signature = [0] * len(disc.groups)
        for (gid, _), r in zip(located, inv.exponents):
            signature[gid] += r

        if inv.kind == FAMILY1:
            ok = all(abs(lams[gid] - 1.0) <= 1e-8 for gid, _ in located)
            reason = "lambda=1 membership" if ok else "operator not in the fixed-point space"
        elif all(s == 0 for s in signature):
            # Pure within-group relation: a family-2 basis change.
            ok = all(dims[gid] >= 2 for gid, _ in located)
            reason = "same-group ratio" if ok else "group too small for a ratio"
        else:
            prod = 1.0 + 0.0j
            for gid, s in enumerate(signature):
                if s != 0:
                    prod *= lams[gid] ** s
            if abs(prod - 1.0) > PRODUCT_TOL:
                out.append(MatchReport(inv.label, False, "eigenvalue product is not 1", np.inf))
                continue
            ok = disc.lattice.contains(signature)
            reason = "signature in discovered lattice" if ok else "signature outside lattice"

        max_dev = 0.0
        if ok:
            recon_inv = InvariantSpec(
                kind=inv.kind, operators=tuple(r for _, r in located),
                exponents=inv.exponents, label=inv.label + "(recon)")
            for rho in test_states:
                try:
                    v1 = evaluate_invariant(inv, rho)
                    v2 = evaluate_invariant(recon_inv, rho)
                except DenominatorUnderflow:
                    continue
                if any(abs(expectation(rho, op)) < SKIP_FLOOR for op in inv.operators):
                    continue
                max_dev = max(max_dev, abs(v1 - v2) / max(1.0, abs(v1)))
            ok = max_dev <= tol
            if not ok:
                reason = f"value deviation {max_dev:.2e}"
        out.append(MatchReport(inv.label, ok, reason, max_dev))
    return out
