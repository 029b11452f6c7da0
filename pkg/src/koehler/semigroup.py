"""Exact finite semigroups given by Cayley tables.

Products follow operator composition: for transformations ``(a * b)(i) =
a(b(i))``, for matrices ``a * b = a @ b``.  With this convention the minimal
left ideals ``S * e`` are labelled by kernels and the minimal right ideals
``e * S`` by images.

In a finite discrete semigroup every element is continuous in both
variables, so the topological center is the whole semigroup and only the
algebraic center carries information; :func:`center` computes that one.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CapExceededError, CollapseError, InvalidInputError, UnsupportedInputError
from .report import CheckReport

FULL_ASSOCIATIVITY_LIMIT = 512
DEFAULT_CAP = 4096


@dataclass(eq=False)
class FiniteSemigroup:
    """Cayley table plus optional provenance.

    ``elements`` holds the underlying objects (maps, boolean or float
    matrices) when the semigroup was generated from them; ``words`` holds
    the shortlex-least generator word of each element.
    """

    cayley: np.ndarray
    elements: list | None = None
    kind: str = "abstract"
    words: list | None = None
    generators: list = field(default_factory=list)

    def __post_init__(self):
        c = np.asarray(self.cayley, dtype=np.int64)
        m = c.shape[0] if c.ndim == 2 else 0
        if c.ndim != 2 or c.shape != (m, m) or m == 0:
            raise InvalidInputError(f"Cayley table must be a non-empty square array, got {c.shape}")
        if c.min() < 0 or c.max() >= m:
            raise InvalidInputError("Cayley table entries out of range")
        self.cayley = c
        if not self.generators:
            self.generators = list(range(m))
        bad = find_nonassociative(c)
        if bad is not None:
            raise InvalidInputError(f"table is not associative at {bad}")

    @property
    def size(self) -> int:
        return self.cayley.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def left_multiples(self, a: int) -> frozenset:
        """S * a"""
        return frozenset(int(x) for x in self.cayley[:, a])

    def right_multiples(self, a: int) -> frozenset:
        """a * S"""
        return frozenset(int(x) for x in self.cayley[a, :])

    def set_product(self, X, Y) -> frozenset:
        return frozenset(int(self.cayley[x, y]) for x in X for y in Y)

    def to_dict(self) -> dict:
        return {"size": self.size, "cayley": self.cayley.tolist()}


def find_nonassociative(cayley, samples: int = 100_000, seed: int = 0):
    """First triple (a, b, c) with (ab)c != a(bc), or None.

    Exhaustive up to 512 elements, sampled above.
    """
    C = np.asarray(cayley)
    m = C.shape[0]
    if m <= FULL_ASSOCIATIVITY_LIMIT:
        chunk = max(1, 2 ** 22 // (m * m))
        for lo in range(0, m, chunk):
            a = np.arange(lo, min(m, lo + chunk))
            left = C[C[a, :], :]  # [(a b) c]
            right = C[a][:, C]  # [a (b c)]
            diff = np.argwhere(left != right)
            if diff.size:
                i, b, c = diff[0]
                return int(a[i]), int(b), int(c)
        return None
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, m, size=(3, samples))
    bad = np.flatnonzero(C[C[a, b], c] != C[a, C[b, c]])
    if bad.size:
        i = bad[0]
        return int(a[i]), int(b[i]), int(c[i])
    return None


# ------------------------------------------------------------- generation


class _ExactIndex:
    def __init__(self, key):
        self.key = key
        self.table = {}

    def find(self, x):
        return self.table.get(self.key(x))

    def add(self, x, idx):
        self.table[self.key(x)] = idx


class _NearIndex:
    """Nearest-element lookup for float matrices under Frobenius distance < epsilon."""

    def __init__(self, epsilon):
        self.epsilon = epsilon
        self.stack = None

    def find(self, x):
        if self.stack is None:
            return None
        d = np.linalg.norm((self.stack - x).reshape(len(self.stack), -1), axis=1)
        j = int(np.argmin(d))
        return j if d[j] < self.epsilon else None

    def add(self, x, idx):
        x = np.asarray(x)[None]
        self.stack = x.copy() if self.stack is None else np.concatenate([self.stack, x])


def generate(generators: Sequence, product_rule: Callable, cap: int = DEFAULT_CAP,
             key: Callable | None = None, epsilon: float | None = None,
             kind: str = "abstract") -> FiniteSemigroup:
    """Close ``generators`` under ``product_rule``.

    Elements are discovered breadth-first by right multiplication with the
    generators in order, so each element's label is its shortlex-least
    generator word.  With ``epsilon`` set, two float matrices are identified
    when their Frobenius distance is below it; the resulting table is then
    re-checked for associativity.
    """
    index = _NearIndex(epsilon) if epsilon is not None else _ExactIndex(key or (lambda x: x))
    elements: list = []
    words: list = []
    gen_idx: list[int] = []
    for i, g in enumerate(generators):
        j = index.find(g)
        if j is None:
            j = len(elements)
            elements.append(g)
            words.append((i,))
            index.add(g, j)
        gen_idx.append(j)
    head = 0
    while head < len(elements):
        x = elements[head]
        for i, g in enumerate(generators):
            y = product_rule(x, g)
            if index.find(y) is None:
                if len(elements) >= cap:
                    raise CapExceededError(f"semigroup exceeds cap of {cap} elements")
                index.add(y, len(elements))
                elements.append(y)
                words.append(words[head] + (i,))
        head += 1
    m = len(elements)
    table = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            j = index.find(product_rule(elements[a], elements[b]))
            if j is None:
                raise CollapseError(
                    f"product of elements {a}, {b} matches no element; epsilon {epsilon} too small"
                )
            table[a, b] = j
    bad = find_nonassociative(table)
    if bad is not None:
        raise CollapseError(f"collapsed table is not associative at {bad}; use a smaller epsilon")
    return FiniteSemigroup(table, elements, kind, words, gen_idx)


def compose(a: tuple, b: tuple) -> tuple:
    """(a o b)(i) = a[b[i]]"""
    return tuple(a[i] for i in b)


def transformation_semigroup(maps, cap: int = DEFAULT_CAP) -> FiniteSemigroup:
    maps = [tuple(int(v) for v in f) for f in maps]
    k = len(maps[0]) if maps else 0
    if not maps or any(len(f) != k or any(not 0 <= v < k for v in f) for f in maps):
        raise InvalidInputError("transformations must be equal-length image arrays on {0..k-1}")
    return generate(maps, compose, cap, kind="transformation")


def _bool_key(a):
    return np.asarray(a, dtype=bool).tobytes()


def boolean_matrix_semigroup(mats, cap: int = DEFAULT_CAP) -> FiniteSemigroup:
    mats = [np.asarray(a, dtype=bool) for a in mats]
    return generate(mats, lambda a, b: (a.astype(int) @ b.astype(int)) > 0, cap,
                    key=_bool_key, kind="boolean")


def matrix_semigroup(mats, epsilon: float = 1e-9, cap: int = DEFAULT_CAP) -> FiniteSemigroup:
    mats = [np.asarray(a, dtype=complex) for a in mats]
    return generate(mats, lambda a, b: a @ b, cap, epsilon=epsilon, kind="matrix")


def from_cayley(table) -> FiniteSemigroup:
    return FiniteSemigroup(np.asarray(table))


def from_dict(d: dict, epsilon: float | None = None) -> FiniteSemigroup:
    """Build from ``{"size", "cayley"}`` or ``{"kind", "generators"}`` JSON."""
    if "cayley" in d:
        S = from_cayley(d["cayley"])
        if "size" in d and d["size"] != S.size:
            raise InvalidInputError(f"declared size {d['size']} != table size {S.size}")
        return S
    kind = d.get("kind", "transformations")
    gens = d.get("generators")
    if not gens:
        raise InvalidInputError("generator JSON needs a non-empty 'generators' list")
    if kind in ("transformations", "transformation"):
        return transformation_semigroup(gens)
    if kind == "boolean":
        return boolean_matrix_semigroup(gens)
    if kind in ("matrices", "matrix"):
        from .linalg import matrix_from_dict
        mats = [matrix_from_dict(g if isinstance(g, dict) else {"entries": g}).entries for g in gens]
        return matrix_semigroup(mats, epsilon if epsilon is not None else d.get("epsilon", 1e-9))
    raise InvalidInputError(f"unknown generator kind {kind!r}")


def load(path, epsilon: float | None = None) -> FiniteSemigroup:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: {exc}") from exc
    return from_dict(d, epsilon)


# ------------------------------------------------------------- structure


def idempotents(S: FiniteSemigroup) -> list[int]:
    return [a for a in range(S.size) if S.cayley[a, a] == a]


def idempotent_power(S: FiniteSemigroup, a: int) -> int:
    """The unique idempotent in the cycle of a, a^2, a^3, ..."""
    seen = []
    x = a
    while x not in seen:
        seen.append(x)
        x = S.mul(x, a)
    cycle = seen[seen.index(x):]
    found = [y for y in cycle if S.cayley[y, y] == y]
    if len(found) != 1:
        raise AssertionError(f"power cycle of {a} has {len(found)} idempotents")
    return found[0]


def idempotents_by_powers(S: FiniteSemigroup) -> list[int]:
    return sorted({idempotent_power(S, a) for a in range(S.size)})


def leq(S: FiniteSemigroup, e: int, f: int) -> bool:
    """e <= f  iff  e = e f = f e"""
    return S.cayley[e, f] == e and S.cayley[f, e] == e


def idempotent_order(S: FiniteSemigroup) -> list[tuple[int, int]]:
    E = idempotents(S)
    return [(e, f) for e in E for f in E if leq(S, e, f)]


def minimal_idempotents(S: FiniteSemigroup) -> list[int]:
    E = idempotents(S)
    return [e for e in E if all(f == e or not leq(S, f, e) for f in E)]


@dataclass(frozen=True)
class IdealRecord:
    kind: str  # "left" or "right"
    members: frozenset
    minimal: bool


def _principal(S: FiniteSemigroup, kind: str) -> list[IdealRecord]:
    gen = S.left_multiples if kind == "left" else S.right_multiples
    distinct = sorted({gen(a) for a in range(S.size)}, key=lambda s: (len(s), sorted(s)))
    return [IdealRecord(kind, I, not any(J < I for J in distinct)) for I in distinct]


def principal_ideals(S: FiniteSemigroup) -> tuple[list[IdealRecord], list[IdealRecord]]:
    """All distinct principal left ideals S a and right ideals a S, minimal ones flagged."""
    return _principal(S, "left"), _principal(S, "right")


def minimal_ideals(S: FiniteSemigroup) -> tuple[list[IdealRecord], list[IdealRecord]]:
    left, right = principal_ideals(S)
    return [I for I in left if I.minimal], [I for I in right if I.minimal]


def kernel(S: FiniteSemigroup) -> frozenset:
    """The minimal two-sided ideal (union of the minimal left ideals)."""
    left, _ = minimal_ideals(S)
    return frozenset().union(*(I.members for I in left))


def _group_failures(S: FiniteSemigroup, G: frozenset) -> list[str]:
    out = []
    if not G:
        return ["empty set"]
    if S.set_product(G, G) - G:
        out.append("not closed")
    E = [x for x in G if S.cayley[x, x] == x]
    if len(E) != 1:
        return out + [f"{len(E)} idempotents"]
    e = E[0]
    for x in G:
        if not (S.cayley[x, e] == x and S.cayley[e, x] == x):
            out.append(f"{e} is not an identity for {x}")
        if not any(S.cayley[x, y] == e and S.cayley[y, x] == e for y in G):
            out.append(f"{x} has no inverse")
    return out


def rees_checks(S: FiniteSemigroup) -> CheckReport:
    """Group structure of the minimal ideal.

    * every minimal idempotent e: e S e is a group, e S and S e are the
      minimal right and left ideals through e;
    * every minimal left L and right R: L n R = R L is a group with exactly
      one idempotent;
    * #minimal idempotents = #minimal left ideals x #minimal right ideals.
    """
    rep = CheckReport("rees")
    left, right = minimal_ideals(S)
    M = minimal_idempotents(S)
    K = kernel(S)
    in_kernel = sorted(e for e in idempotents(S) if e in K)
    if in_kernel != sorted(M):
        rep.fail(f"order-minimal idempotents {M} differ from kernel idempotents {in_kernel}")
    L_sets = {I.members for I in left}
    R_sets = {I.members for I in right}
    for e in M:
        eSe = S.set_product(S.right_multiples(e), [e])
        for msg in _group_failures(S, eSe):
            rep.fail(f"eSe for e = {e}: {msg}")
        if S.right_multiples(e) not in R_sets:
            rep.fail(f"e S for e = {e} is not a minimal right ideal")
        if S.left_multiples(e) not in L_sets:
            rep.fail(f"S e for e = {e} is not a minimal left ideal")
    group_orders = set()
    for L in left:
        for R in right:
            G = L.members & R.members
            for msg in _group_failures(S, G):
                rep.fail(f"L n R ({sorted(L.members)} n {sorted(R.members)}): {msg}")
            if S.set_product(R.members, L.members) != G:
                rep.fail(f"R L != L n R for L = {sorted(L.members)}, R = {sorted(R.members)}")
            group_orders.add(len(G))
    if len(M) != len(left) * len(right):
        rep.fail(f"{len(M)} minimal idempotents but {len(left)} x {len(right)} minimal ideals")
    rep.certificates.update(
        minimal_idempotents=M, minimal_left=len(left), minimal_right=len(right),
        kernel_size=len(K), group_orders=sorted(group_orders),
    )
    return rep


# ---------------------------------------------------- kernel/image labels


def _partition_key(values: Sequence) -> tuple:
    first = {}
    return tuple(first.setdefault(v, i) for i, v in enumerate(values))


def _cluster_ids(mats: list[np.ndarray], tol: float) -> list[int]:
    ids, reps = [], []
    for a in mats:
        for j, r in enumerate(reps):
            if a.shape == r.shape and np.linalg.norm(a - r) <= tol:
                ids.append(j)
                break
        else:
            reps.append(a)
            ids.append(len(reps) - 1)
    return ids


def kernel_image_labels(S: FiniteSemigroup, tol: float = 1e-8) -> tuple[list, list]:
    """Hashable kernel and image labels for every element of an acting semigroup.

    transformation: kernel = partition of points by value, image = range;
    boolean matrix: same, for the action on {0,1}^k column vectors;
    float matrix:   orthogonal projectors onto null space and range,
                    grouped up to ``tol``.
    """
    if S.elements is None or S.kind == "abstract":
        raise UnsupportedInputError("kernel/image labels need elements acting on a set or space")
    if S.kind == "transformation":
        return [_partition_key(f) for f in S.elements], [frozenset(f) for f in S.elements]
    if S.kind == "boolean":
        k = S.elements[0].shape[1]
        vecs = np.array(list(itertools.product((0, 1), repeat=k)), dtype=int).T
        kers, ims = [], []
        for a in S.elements:
            out = (a.astype(int) @ vecs) > 0
            cols = [col.tobytes() for col in out.T]
            kers.append(_partition_key(cols))
            ims.append(frozenset(cols))
        return kers, ims
    if S.kind == "matrix":
        kp, ip = [], []
        for a in S.elements:
            u, s, vh = np.linalg.svd(a)
            r = int(np.sum(s > tol * max(1.0, s[0])))
            N = vh[r:].conj().T
            U = u[:, :r]
            kp.append(N @ N.conj().T)
            ip.append(U @ U.conj().T)
        return _cluster_ids(kp, tol), _cluster_ids(ip, tol)
    raise UnsupportedInputError(f"no action known for kind {S.kind!r}")


def minidem_correspondence(S: FiniteSemigroup) -> CheckReport:
    """Minimal idempotents versus kernels and images.

    Checks: same minimal left ideal iff same kernel; same minimal right
    ideal iff same image; and (kernel, image) determines the minimal
    idempotent, with every combination realised exactly once.
    """
    kers, ims = kernel_image_labels(S)
    left, right = minimal_ideals(S)
    M = minimal_idempotents(S)
    rep = CheckReport("minidem_correspondence")
    lid = {e: next(i for i, I in enumerate(left) if e in I.members) for e in M}
    rid = {e: next(i for i, I in enumerate(right) if e in I.members) for e in M}
    for e in M:
        for f in M:
            if (lid[e] == lid[f]) != (kers[e] == kers[f]):
                rep.fail(f"left ideal / kernel mismatch for idempotents {e}, {f}")
            if (rid[e] == rid[f]) != (ims[e] == ims[f]):
                rep.fail(f"right ideal / image mismatch for idempotents {e}, {f}")
    pairs = {(kers[e], ims[e]) for e in M}
    n_ker = len({kers[e] for e in M})
    n_im = len({ims[e] for e in M})
    if len(pairs) != len(M):
        rep.fail("two minimal idempotents share kernel and image")
    if len(pairs) != n_ker * n_im:
        rep.fail(f"{len(pairs)} (kernel, image) pairs realised, expected {n_ker} x {n_im}")
    if n_ker != len(left) or n_im != len(right):
        rep.fail(f"{n_ker} kernels / {n_im} images vs {len(left)} left / {len(right)} right ideals")
    rep.certificates.update(minimal_idempotents=len(M), kernels=n_ker, images=n_im,
                            minimal_left=len(left), minimal_right=len(right))
    if len(M) == 1:
        rep.notes.append("single minimal idempotent; correspondence is trivial")
    return rep


def center(S: FiniteSemigroup) -> list[int]:
    """Elements commuting with everything.

    Raises AssertionError if this differs from the centralizer of the
    generators (they must agree since the generators generate S).
    """
    C = S.cayley
    full = [a for a in range(S.size) if np.array_equal(C[a, :], C[:, a])]
    gens = S.generators
    by_gens = [a for a in range(S.size) if all(C[a, g] == C[g, a] for g in gens)]
    if full != by_gens:
        raise AssertionError(f"center {full} differs from centralizer of generators {by_gens}")
    return full
