"""Sufficient transformations of X for Y and the data-processing audit.

A deterministic map T on the X-alphabet keeps all information about Y
exactly when, within each T-class, every positive-mass symbol shares the
same conditional P(Y|X=x).  Merging such symbols can never raise the
benefit of side information for a well-behaved loss; `audit_dpa` checks
that, and `find_violation` searches for counterexamples using the
two-class parametric family that witnesses failures for non-logarithmic
losses on alphabets of three or more symbols.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .benefit import c_value
from .errors import AlphabetTooLarge, ParameterOutOfRange
from .losses import LossSpec, loss_alphabet_size, reinstantiate
from .prob import Joint, validate_joint


@dataclass(frozen=True)
class Transform:
    """A total map from X-symbols onto a contiguous T-alphabet (0-based)."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.mapping)
        object.__setattr__(self, "mapping", m)
        labels = sorted(set(m))
        if labels != list(range(len(labels))):
            raise ParameterOutOfRange(f"labels must be contiguous from 0, got {labels}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    @property
    def image_size(self) -> int:
        return max(self.mapping) + 1

    @property
    def is_permutation(self) -> bool:
        return self.image_size == self.n

    @staticmethod
    def identity(n: int) -> "Transform":
        return Transform(tuple(range(n)))

    @staticmethod
    def from_blocks(blocks: Sequence[Sequence[int]], n: int) -> "Transform":
        """Merge transform from a partition; blocks labeled by their smallest member."""
        mapping = [-1] * n
        for label, block in enumerate(sorted(blocks, key=min)):
            for x in block:
                mapping[x] = label
        if any(v < 0 for v in mapping):
            raise ParameterOutOfRange("blocks do not cover the alphabet")
        return Transform(tuple(mapping))


@dataclass(frozen=True)
class SufficiencyCert:
    """Verdict on whether a transform is statistically sufficient.

    max_class_tv is the largest total-variation distance between
    conditionals P(Y|X=x) merged into one class; zero-mass symbols are
    vacuously mergeable and listed separately.
    """

    is_sufficient: bool
    max_class_tv: float
    zero_mass_symbols: tuple[int, ...]


def check_sufficient(t: Transform, j: Joint, tol: float = 1e-9) -> SufficiencyCert:
    """Certify X - T(X) - Y (the T - X - Y chain is automatic for deterministic T)."""
    table = j.table
    px = table.sum(axis=1)
    zero = tuple(int(x) for x in np.nonzero(px <= 0.0)[0])
    rows = {x: table[x] / px[x] for x in range(j.nx) if px[x] > 0.0}
    worst = 0.0
    for label in range(t.image_size):
        members = [x for x in range(j.nx) if t.mapping[x] == label and px[x] > 0.0]
        for a, b in itertools.combinations(members, 2):
            tv = 0.5 * float(np.abs(rows[a] - rows[b]).sum())
            worst = max(worst, tv)
    return SufficiencyCert(is_sufficient=worst <= tol, max_class_tv=worst, zero_mass_symbols=zero)


def push_forward(j: Joint, t: Transform) -> Joint:
    """The joint of (T(X), Y) on the contiguous T-alphabet."""
    out = np.zeros((t.image_size, j.ny))
    np.add.at(out, np.array(t.mapping), j.table)
    return Joint(out)


def padded_push_forward(j: Joint, t: Transform) -> Joint:
    """The joint of (T(X), Y) kept on the original alphabet.

    Each class's mass lands on its smallest member, so a fixed-size loss on
    the original alphabet still applies after the merge.
    """
    reps = {}
    for x, label in enumerate(t.mapping):
        reps.setdefault(label, x)
    idx = np.array([reps[label] for label in t.mapping])
    out = np.zeros_like(j.table)
    np.add.at(out, idx, j.table)
    return Joint(out)


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _row_classes(j: Joint, tol: float) -> tuple[list[list[int]], list[int]]:
    """Group positive-mass symbols by equal conditional rows; pool zero-mass ones."""
    table = j.table
    px = table.sum(axis=1)
    classes: list[list[int]] = []
    reps: list[np.ndarray] = []
    zero: list[int] = []
    for x in range(j.nx):
        if px[x] <= 0.0:
            zero.append(x)
            continue
        row = table[x] / px[x]
        for cls, rep in zip(classes, reps):
            if 0.5 * float(np.abs(row - rep).sum()) <= tol:
                cls.append(x)
                break
        else:
            classes.append([x])
            reps.append(row)
    return classes, zero


@dataclass(frozen=True)
class SufficientSet:
    """Enumerated sufficient transforms: merge family plus permutations.

    All n! permutations are sufficient; they are materialized exhaustively
    for n <= 5 and as a seeded sample otherwise (permutations_exhaustive
    records which).
    """

    merges: tuple[Transform, ...]
    permutations: tuple[Transform, ...]
    permutations_exhaustive: bool


def enumerate_sufficient(
    j: Joint,
    tol: float = 1e-9,
    seed: int = 0,
    max_alphabet: int = 12,
    perm_samples: int = 24,
) -> SufficientSet:
    """All sufficient merge-transforms, from partitions refining the row classes.

    Zero-mass symbols form their own vacuous class.  Raises
    AlphabetTooLarge beyond the partition-enumeration bound.
    """
    n = j.nx
    if n > max_alphabet:
        raise AlphabetTooLarge(f"alphabet size {n} exceeds enumeration bound {max_alphabet}")
    classes, zero = _row_classes(j, tol)
    groups = [c for c in classes]
    if zero:
        groups.append(zero)
    merge_list: list[Transform] = []
    per_group = [list(_set_partitions(g)) for g in groups]
    for combo in itertools.product(*per_group):
        blocks = [block for group_part in combo for block in group_part]
        merge_list.append(Transform.from_blocks(blocks, n))
    if n <= 5:
        perms = tuple(
            Transform(tuple(p)) for p in itertools.permutations(range(n))
        )
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        seen = {tuple(range(n))}
        for _ in range(perm_samples):
            seen.add(tuple(int(v) for v in rng.permutation(n)))
        perms = tuple(Transform(p) for p in sorted(seen))
        exhaustive = False
    return SufficientSet(merges=tuple(merge_list), permutations=perms, permutations_exhaustive=exhaustive)


@dataclass(frozen=True)
class ViolationWitness:
    """Evidence that a sufficient transform changed the benefit.

    kind is "dpa_violation" when a merge strictly raised C, "asymmetry"
    when a permutation changed C at all (permutations and their inverses
    are both sufficient, so equality is forced there).
    """

    joint: Joint
    transform: Transform
    c_before: float
    c_after: float
    kind: str


def _c_after(l: LossSpec, j: Joint, t: Transform, tol: float, seed: int = 0) -> float:
    """Benefit after applying a sufficient transform.

    Named loss families are re-instantiated on the reduced alphabet; a
    fixed-size loss is evaluated on the padded push-forward instead, which
    keeps the merged variable on the original alphabet.
    """
    m = t.image_size
    n = loss_alphabet_size(l)
    if m == j.nx:
        return c_value(l, push_forward(j, t), seed=seed)
    fam = reinstantiate(l, m)
    if fam is not None and (n is None or n == j.nx):
        return c_value(fam, push_forward(j, t), seed=seed)
    return c_value(l, padded_push_forward(j, t), seed=seed)


def verify_witness(l: LossSpec, w: ViolationWitness, tol: float = 1e-9, value_tol: float = 1e-12) -> bool:
    """Recompute both benefits from the stored joint and transform."""
    before = c_value(l, w.joint)
    after = _c_after(l, w.joint, w.transform, tol)
    if abs(before - w.c_before) > value_tol or abs(after - w.c_after) > value_tol:
        return False
    if w.kind == "dpa_violation":
        return after > before + tol
    if w.kind == "asymmetry":
        return abs(after - before) > tol
    return False


@dataclass(frozen=True)
class AuditEntry:
    transform: Transform
    c_after: float


@dataclass(frozen=True)
class DpaAuditReport:
    """Benefit before/after every enumerated sufficient transform.

    `violations` holds the strict c_after > c_before + tol merges and any
    permutation asymmetries.  `equality_deviations` separately records
    merges where |c_after - c_before| > tol in either direction, for the
    stronger mutual-sufficiency reading of the axiom.
    """

    c_before: float
    entries: tuple[AuditEntry, ...]
    violations: tuple[ViolationWitness, ...]
    equality_deviations: tuple[AuditEntry, ...]

    @property
    def clean(self) -> bool:
        return not self.violations


def audit_dpa(
    l: LossSpec,
    j: Joint,
    tol: float = 1e-9,
    seed: int = 0,
    workers: int = 1,
) -> DpaAuditReport:
    """Audit the data-processing requirement on every enumerated sufficient transform."""
    before = c_value(l, j, seed=seed)
    suff = enumerate_sufficient(j, tol=tol, seed=seed)
    candidates = [(t, False) for t in suff.merges] + [(t, True) for t in suff.permutations]

    def evaluate(item):
        t, is_perm = item
        return AuditEntry(transform=t, c_after=_c_after(l, j, t, tol, seed=seed)), is_perm

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, candidates))
    else:
        results = [evaluate(c) for c in candidates]

    entries: list[AuditEntry] = []
    violations: list[ViolationWitness] = []
    deviations: list[AuditEntry] = []
    for entry, is_perm in results:
        entries.append(entry)
        if is_perm:
            if abs(entry.c_after - before) > tol and not entry.transform.mapping == tuple(
                range(j.nx)
            ):
                violations.append(
                    ViolationWitness(
                        joint=j,
                        transform=entry.transform,
                        c_before=before,
                        c_after=entry.c_after,
                        kind="asymmetry",
                    )
                )
        else:
            if entry.c_after > before + tol:
                violations.append(
                    ViolationWitness(
                        joint=j,
                        transform=entry.transform,
                        c_before=before,
                        c_after=entry.c_after,
                        kind="dpa_violation",
                    )
                )
            if abs(entry.c_after - before) > tol:
                deviations.append(entry)
    return DpaAuditReport(
        c_before=before,
        entries=tuple(entries),
        violations=tuple(violations),
        equality_deviations=tuple(deviations),
    )


def proof_family(
    n: int,
    t: float,
    lambda1: float,
    lambda2: float,
    alpha: float,
    tail: Sequence[float] = (),
) -> Joint:
    """The two-conditional family whose {x1, x2} merge is sufficient by construction.

    P_lambda = (lambda*t, lambda*(1-t), r-lambda, tail...), r = 1 - sum(tail),
    with P(X|Y=1) at lambda1, P(X|Y=2) at lambda2, and P(Y=1) = alpha.  Both
    conditionals put x1 and x2 in ratio t : (1-t), so P(Y|x1) = P(Y|x2).
    """
    if n < 3:
        raise ParameterOutOfRange("proof family needs an alphabet of size >= 3")
    tail = tuple(float(v) for v in tail)
    if len(tail) != n - 3:
        raise ParameterOutOfRange(f"tail must have {n - 3} entries, got {len(tail)}")
    if any(v < 0 for v in tail) or sum(tail) >= 1.0:
        raise ParameterOutOfRange("tail entries must be >= 0 and sum to < 1")
    r = 1.0 - sum(tail)
    if not (0.0 <= t <= 1.0):
        raise ParameterOutOfRange(f"t must be in [0, 1], got {t}")
    if not (0.0 <= alpha <= 1.0):
        raise ParameterOutOfRange(f"alpha must be in [0, 1], got {alpha}")
    if not (0.0 <= lambda1 < lambda2 <= r + 1e-15):
        raise ParameterOutOfRange(
            f"need 0 <= lambda1 < lambda2 <= r = {r}, got {lambda1}, {lambda2}"
        )

    def member(lam: float) -> np.ndarray:
        return np.array([lam * t, lam * (1.0 - t), r - lam, *tail])

    col1 = alpha * member(lambda1)
    col2 = (1.0 - alpha) * member(lambda2)
    return validate_joint(np.stack([col1, col2], axis=1))


MERGE_FIRST_TWO = "merge-x1-x2"


def _center_out(values: np.ndarray) -> np.ndarray:
    order = np.argsort(np.abs(values - 0.5), kind="stable")
    return values[order]


_GRID_POINTS = 20
_T_GRID = _center_out(np.linspace(0.0, 1.0, _GRID_POINTS))
_ALPHA_GRID = _center_out(np.linspace(0.0, 1.0, _GRID_POINTS))
_S_GRID = np.linspace(0.0, 1.0, _GRID_POINTS)
_LAMBDA_PAIRS = [
    (_S_GRID[i], _S_GRID[j])
    for i in range(_GRID_POINTS)
    for j in range(_GRID_POINTS - 1, i, -1)
]


def _grid_candidate(n: int, k: int, seed: int) -> Optional[tuple[Joint, Transform]]:
    total = len(_T_GRID) * len(_ALPHA_GRID) * len(_LAMBDA_PAIRS)
    if k >= total:
        return None
    per_t = len(_ALPHA_GRID) * len(_LAMBDA_PAIRS)
    t = float(_T_GRID[k // per_t])
    rem = k % per_t
    alpha = float(_ALPHA_GRID[rem // len(_LAMBDA_PAIRS)])
    s1, s2 = _LAMBDA_PAIRS[rem % len(_LAMBDA_PAIRS)]
    if n == 3:
        tail: tuple[float, ...] = ()
        r = 1.0
    else:
        rng = np.random.default_rng([seed, 101, k])
        mass = float(rng.uniform(0.05, 0.6))
        tail = tuple(mass * rng.dirichlet(np.ones(n - 3)))
        r = 1.0 - mass
    lam1, lam2 = s1 * r, s2 * r
    if not lam1 < lam2:
        return None
    joint = proof_family(n, t, lam1, lam2, alpha, tail)
    merge = Transform(tuple([0, 0] + list(range(1, n - 1))))
    return joint, merge


def _merge_candidate(n: int, k: int, seed: int) -> Optional[tuple[Joint, Transform]]:
    rng = np.random.default_rng([seed, 202, k])
    m = int(rng.integers(2, 4))
    n_classes = int(rng.integers(1, n))
    rows = rng.dirichlet(np.ones(m), size=n_classes)
    assignment = np.concatenate(
        [np.arange(n_classes), rng.integers(0, n_classes, size=n - n_classes)]
    )
    rng.shuffle(assignment)
    px = rng.dirichlet(np.ones(n))
    table = px[:, None] * rows[assignment]
    counts = np.bincount(assignment, minlength=n_classes)
    mergeable = [c for c in range(n_classes) if counts[c] >= 2]
    if not mergeable:
        return None
    cls = mergeable[int(rng.integers(0, len(mergeable)))]
    members = [int(x) for x in np.nonzero(assignment == cls)[0]]
    blocks = [members] + [[x] for x in range(n) if x not in members]
    return validate_joint(table), Transform.from_blocks(blocks, n)


def _perm_candidate(n: int, k: int, seed: int) -> Optional[tuple[Joint, Transform]]:
    rng = np.random.default_rng([seed, 303, k])
    m = int(rng.integers(2, 4))
    table = rng.dirichlet(np.ones(n * m)).reshape(n, m)
    perm = rng.permutation(n)
    if np.array_equal(perm, np.arange(n)):
        perm = np.roll(perm, 1)
    return validate_joint(table), Transform(tuple(int(v) for v in perm))


def find_violation(
    l: LossSpec,
    n: int,
    budget: int = 10_000,
    seed: int = 0,
    tol: float = 1e-9,
    workers: int = 1,
) -> Optional[ViolationWitness]:
    """Deterministic scan for a data-processing violation; None if budget is spent.

    Candidates interleave three streams round-robin so every family is
    covered within any budget: (a) the parametric two-conditional grid with
    its built-in sufficient merge, (b) seeded random joints with duplicated
    conditional rows plus a random sufficient merge, (c) seeded random
    joints with random permutations.  The first witness in scan order wins
    regardless of worker count, and is re-verified before being returned.
    """
    if n < 2:
        raise ParameterOutOfRange("alphabet size must be >= 2")

    def candidate(idx: int) -> Optional[ViolationWitness]:
        phase, k = idx % 3, idx // 3
        if phase == 0:
            made = _grid_candidate(n, k, seed) if n >= 3 else None
        elif phase == 1:
            made = _merge_candidate(n, k, seed)
        else:
            made = _perm_candidate(n, k, seed)
        if made is None:
            return None
        joint, transform = made
        before = c_value(l, joint)
        after = _c_after(l, joint, transform, tol)
        if transform.is_permutation:
            if abs(after - before) > tol:
                return ViolationWitness(joint, transform, before, after, "asymmetry")
            return None
        if after > before + tol:
            return ViolationWitness(joint, transform, before, after, "dpa_violation")
        return None

    def first_hit(indices) -> Optional[ViolationWitness]:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for res in pool.map(candidate, indices):
                    if res is not None:
                        return res
            return None
        for idx in indices:
            res = candidate(idx)
            if res is not None:
                return res
        return None

    chunk = max(64, workers * 64)
    for start in range(0, budget, chunk):
        hit = first_hit(range(start, min(start + chunk, budget)))
        if hit is not None:
            if not verify_witness(l, hit, tol=tol):
                raise AssertionError("witness failed re-verification; numeric instability")
            return hit
    return None
