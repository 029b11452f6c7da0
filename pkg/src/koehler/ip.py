"""Finite-sums (IP) structure of return-time sets.

A set contained in an idempotent ultrafilter contains all finite sums of
some infinite sequence.  Here the sequences are truncated to length ``m``
and the sets to ``[1, N]``; the search is exhaustive and deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import HorizonError, InvalidInputError, NotPowerBoundedError
from .jdlg import Decomposition, return_set
from .linalg import UNIMODULAR_TOL, as_operator, eigen_decompose, is_power_bounded
from .report import CheckReport

MAX_SUMS_LENGTH = 20
MAX_SEARCH_LENGTH = 8
DEFAULT_LENGTH = 4
MAX_ROOT_ORDER = 1000


@dataclass(frozen=True)
class IPWitness:
    sequence: tuple
    fs_set: frozenset

    def to_dict(self) -> dict:
        return {"sequence": list(self.sequence), "fs": sorted(self.fs_set)}


def finite_sums(xs) -> frozenset:
    """Sums over all nonempty subsets of a strictly increasing positive sequence."""
    xs = [int(x) for x in xs]
    if not xs:
        raise InvalidInputError("finite_sums needs a nonempty sequence")
    if len(xs) > MAX_SUMS_LENGTH:
        raise InvalidInputError(f"sequence length {len(xs)} exceeds {MAX_SUMS_LENGTH}")
    if xs[0] < 1 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise InvalidInputError(f"sequence must be strictly increasing positive integers, got {xs}")
    sums: set[int] = set()
    for x in xs:
        sums |= {s + x for s in sums} | {x}
    return frozenset(sums)


def find_fs_sequence(A, m: int, bound: int) -> IPWitness | None:
    """Lexicographically first x_1 < ... < x_m <= bound with FS(x) inside A.

    Backtracking over the elements of A in ascending order; a partial
    sequence is abandoned as soon as one of its sums leaves A.
    """
    if not 1 <= m <= MAX_SEARCH_LENGTH:
        raise InvalidInputError(f"length m must be in [1, {MAX_SEARCH_LENGTH}], got {m}")
    A = frozenset(int(a) for a in A)
    cands = sorted(a for a in A if 1 <= a <= bound)

    def extend(seq, sums, start):
        if len(seq) == m:
            return seq, sums
        for i in range(start, len(cands)):
            x = cands[i]
            new = {s + x for s in sums} | {x}
            if new <= A:
                found = extend(seq + (x,), sums | new, i + 1)
                if found:
                    return found
        return None

    found = extend((), frozenset(), 0)
    if found is None:
        return None
    seq, sums = found
    return IPWitness(seq, frozenset(sums))


def return_time_set(T, x, epsilon: float, N: int) -> list[int]:
    """{n <= N : ||T^n x - x|| < epsilon}"""
    T = as_operator(T)
    pb = is_power_bounded(T)
    if not pb:
        raise NotPowerBoundedError(f"return sets need a power-bounded operator ({pb})")
    x = np.asarray(x, dtype=complex)
    if x.shape != (T.dim,):
        raise InvalidInputError(f"vector of length {T.dim} expected, got shape {x.shape}")
    return return_set(T.entries, x, epsilon, N)


def root_order(z: complex, max_order: int = MAX_ROOT_ORDER, tol: float = 1e-9) -> int | None:
    """Smallest k <= max_order with z^k = 1 within ``tol``, else None."""
    turns = Fraction(float(np.angle(z) / (2 * np.pi)) % 1.0).limit_denominator(max_order)
    k = turns.denominator
    return k if abs(z ** k - 1) <= tol * k else None


def orbit_gap(k: int) -> float:
    """min over 0 < j < k of |1 - exp(2 pi i j / k)|"""
    return 2 * np.sin(np.pi / k) if k > 1 else np.inf


def verify_ip_recurrence(T, D: Decomposition, epsilon: float = 1e-6, N: int = 1000,
                         m: int = DEFAULT_LENGTH) -> CheckReport:
    """Finite-sums witnesses inside the return sets of reversible vectors.

    For each vector of the rev basis a length-m witness is searched in its
    return set.  For every eigenvector whose eigenvalue is a root of unity
    of order k, the return set must equal the multiples of k up to N.
    Meant for fixtures whose unimodular eigenvalues are roots of unity;
    other angles are reported and skipped.
    """
    T = as_operator(T)
    A = T.entries
    rep = CheckReport("ip_recurrence")
    rep.notes.append(f"sequences truncated to length {m} and return sets to [1, {N}]")
    witnesses = []
    for x in D.rev_basis.vectors.T:
        R = return_set(A, x, epsilon, N)
        w = find_fs_sequence(R, m, N) if R else None
        if w is None:
            raise HorizonError(
                f"no length-{m} finite-sums witness in a return set of size {len(R)} "
                f"up to N = {N}; increase N"
            )
        if not w.fs_set <= set(R):
            rep.fail(f"witness {w.sequence} leaves its return set")
        witnesses.append(list(w.sequence))
    rep.certificates["witnesses"] = witnesses

    eig = eigen_decompose(T)
    orders, irrational = [], []
    for i, e in enumerate(eig.spectrum.eigenvalues):
        if abs(e.value) < 1 - UNIMODULAR_TOL:
            continue
        k = root_order(e.value)
        if k is None:
            irrational.append(float(np.angle(e.value)))
            continue
        orders.append(k)
        expected = list(range(k, N + 1, k))
        for v in eig.eigenvectors[i].T:
            v = v / np.linalg.norm(v)
            eps = min(epsilon, 0.5 * orbit_gap(k))
            R = return_set(A, v, eps, N)
            if R != expected:
                rep.fail(f"return set of an eigenvector for a root of order {k} is not {k}N")
            w = find_fs_sequence(R, m, N)
            if w is not None and any(s % k for s in w.fs_set):
                rep.fail(f"finite sums of multiples of {k} left {k}N")
    rep.certificates["root_orders"] = orders
    if irrational:
        rep.notes.append(f"eigenvalue angles {irrational} are not roots of unity of order "
                         f"<= {MAX_ROOT_ORDER}; exact return sets not checked")
    return rep
