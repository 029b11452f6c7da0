"""Dense complex linear algebra substrate.

Everything here works on small dense matrices (n <= 256).  The eigensolver is
a plain Hessenberg reduction followed by single-shift complex QR sweeps; the
resulting Schur form can be reordered with Givens swaps and decoupled by a
triangular Sylvester solve, which is how invariant subspaces are split.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConvergenceError, IllConditionedSplitError, InvalidInputError

DEFAULT_TOL = 1e-9
MAX_DIM = 256
#: eigenvalues closer than this are merged into one cluster
CLUSTER_TOL = 1e-6
#: |lambda| >= 1 - UNIMODULAR_TOL counts as unimodular
UNIMODULAR_TOL = 1e-6
#: minimal distance between the two eigenvalue groups of an invariant split
SPLIT_GAP = 1e-6
#: probe horizon for the power-bound estimate
POWER_PROBE = 1000
_SWEEPS_PER_DIM = 100
_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A square complex matrix acting on C^n with an attached tolerance."""

    entries: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")
        if a.shape[0] > MAX_DIM:
            raise InvalidInputError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("matrix has non-finite entries")
        if not (0 < self.tol < 1e-2):
            raise InvalidInputError(f"tol must lie in (0, 1e-2), got {self.tol}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def A(self) -> np.ndarray:
        return self.entries

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.entries.imag == 0))

    def norm2(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def to_dict(self) -> dict:
        return matrix_to_dict(self.entries)


def as_operator(T, tol: float | None = None) -> OperatorMatrix:
    if isinstance(T, OperatorMatrix):
        if tol is None or tol == T.tol:
            return T
        return OperatorMatrix(T.entries, tol)
    return OperatorMatrix(np.asarray(T), DEFAULT_TOL if tol is None else tol)


def _array(T) -> np.ndarray:
    return T.entries if isinstance(T, OperatorMatrix) else np.asarray(T, dtype=complex)


# ---------------------------------------------------------------- matrix I/O


def matrix_to_dict(a) -> dict:
    a = np.asarray(a)
    if np.iscomplexobj(a) and np.any(a.imag != 0):
        rows = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in a]
    else:
        rows = [[float(z) for z in row] for row in np.real(a)]
    return {"dim": int(a.shape[0]), "entries": rows}


def matrix_from_dict(d: dict, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    try:
        rows = d["entries"]
        a = np.array(
            [[complex(z["re"], z.get("im", 0.0)) if isinstance(z, dict) else complex(z) for z in row]
             for row in rows],
            dtype=complex,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix JSON: {exc}") from exc
    if "dim" in d and a.shape != (d["dim"], d["dim"]):
        raise InvalidInputError(f"declared dim {d['dim']} does not match entries of shape {a.shape}")
    return OperatorMatrix(a, tol)


def matrix_from_csv(text: str, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    try:
        a = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"malformed CSV matrix: {exc}") from exc
    return OperatorMatrix(a, tol)


def load_matrix(path, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(text, tol)
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc
    if isinstance(d, list):
        d = {"entries": d}
    return matrix_from_dict(d, tol)


# ------------------------------------------------------------ Schur machinery


def _givens(a: complex, b: complex):
    """Return (c, s) with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    r = np.hypot(abs(a), abs(b))
    phase = a / abs(a)
    return abs(a) / r, phase * np.conj(b) / r


def _rotate(H, Q, k, c, s, row_lo, col_hi):
    """Similarity H <- G H G^H acting on indices k, k+1; Q <- Q G^H."""
    G = np.array([[c, s], [-np.conj(s), c]])
    H[k:k + 2, row_lo:] = G @ H[k:k + 2, row_lo:]
    Gh = G.conj().T
    H[:col_hi, k:k + 2] = H[:col_hi, k:k + 2] @ Gh
    Q[:, k:k + 2] = Q[:, k:k + 2] @ Gh


def hessenberg(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction A = Q H Q^H with H upper Hessenberg."""
    H = np.array(A, dtype=complex)
    n = H.shape[0]
    Q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = H[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H, Q


def schur(A, max_sweeps: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form A = Z R Z^H via shifted QR on the Hessenberg form.

    Uses Wilkinson shifts with an exceptional shift after 10 stalled steps.
    The total number of QR steps is capped at ``100 * n``; exceeding the cap
    raises :class:`ConvergenceError`.
    """
    R, Z = hessenberg(A)
    n = R.shape[0]
    cap = (_SWEEPS_PER_DIM if max_sweeps is None else max_sweeps) * n
    anorm = np.linalg.norm(R) or 1.0
    hi = n - 1
    steps = stalled = 0
    while hi > 0:
        l = hi
        while l > 0:
            scale = abs(R[l, l]) + abs(R[l - 1, l - 1])
            if abs(R[l, l - 1]) <= _EPS * (scale if scale > 0 else anorm):
                R[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            hi -= 1
            stalled = 0
            continue
        if steps >= cap:
            raise ConvergenceError(f"QR iteration did not converge within {cap} steps")
        steps += 1
        stalled += 1
        a, b = R[hi - 1, hi - 1], R[hi - 1, hi]
        c, d = R[hi, hi - 1], R[hi, hi]
        if stalled % 10 == 0:
            mu = d + 1.5 * abs(c) * np.exp(0.7j * stalled)
        else:
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        idx = np.arange(l, hi + 1)
        R[idx, idx] -= mu
        rots = []
        for k in range(l, hi):
            cs = _givens(R[k, k], R[k + 1, k])
            G = np.array([[cs[0], cs[1]], [-np.conj(cs[1]), cs[0]]])
            R[k:k + 2, k:] = G @ R[k:k + 2, k:]
            R[k + 1, k] = 0.0
            rots.append((k, G))
        for k, G in rots:
            Gh = G.conj().T
            top = min(k + 2, hi + 1)
            R[:top, k:k + 2] = R[:top, k:k + 2] @ Gh
            Z[:, k:k + 2] = Z[:, k:k + 2] @ Gh
        R[idx, idx] += mu
    return np.triu(R), Z


def reorder_schur(R, Z, select) -> tuple[np.ndarray, np.ndarray, int]:
    """Move the diagonal entries flagged by ``select`` to the leading block.

    Returns the reordered (R, Z) and the number of selected entries.
    """
    R = np.array(R, dtype=complex)
    Z = np.array(Z, dtype=complex)
    n = R.shape[0]
    flags = [bool(select(R[i, i])) for i in range(n)]
    k = sum(flags)
    for target in range(k):
        j = next(i for i in range(target, n) if flags[i])
        for p in range(j - 1, target - 1, -1):
            a, b, t = R[p, p], R[p + 1, p + 1], R[p, p + 1]
            c, s = _givens(t, b - a)
            _rotate(R, Z, p, c, s, p, p + 2)
            R[p + 1, p] = 0.0
            flags[p], flags[p + 1] = flags[p + 1], flags[p]
    return np.triu(R), Z, k


def solve_triangular_sylvester(R11, R22, C) -> np.ndarray:
    """Solve R11 Y - Y R22 = C for upper triangular R11, R22."""
    k, m = C.shape
    Y = np.zeros((k, m), dtype=complex)
    I = np.eye(k)
    for j in range(m):
        rhs = C[:, j] + Y[:, :j] @ R22[:j, j]
        Y[:, j] = np.linalg.solve(R11 - R22[j, j] * I, rhs)
    return Y


# ---------------------------------------------------------------- spectra


@dataclass(frozen=True)
class Eigenvalue:
    """One eigenvalue cluster.

    ``peripheral_semisimple`` is only evaluated for unimodular clusters
    (|value| >= 1 - UNIMODULAR_TOL); it is ``None`` for interior ones.
    """

    value: complex
    algebraic_multiplicity: int
    peripheral_semisimple: bool | None = None


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[Eigenvalue, ...]
    spectral_radius: float

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.eigenvalues])

    def multiset(self) -> np.ndarray:
        return np.concatenate(
            [np.full(e.algebraic_multiplicity, e.value) for e in self.eigenvalues]
        ) if self.eigenvalues else np.zeros(0, complex)

    @property
    def dim(self) -> int:
        return sum(e.algebraic_multiplicity for e in self.eigenvalues)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    spectrum: Spectrum
    schur_form: np.ndarray
    schur_vectors: np.ndarray
    raw_eigenvalues: np.ndarray
    eigenvectors: dict = field(default_factory=dict)  # cluster index -> (n, g) basis


def cluster_values(values, tol: float = CLUSTER_TOL) -> list[list[complex]]:
    """Single-linkage clustering of complex numbers."""
    values = list(values)
    clusters: list[list[complex]] = []
    for v in values:
        hits = [c for c in clusters if min(abs(v - w) for w in c) <= tol]
        merged = [v]
        for c in hits:
            merged.extend(c)
            clusters.remove(c)
        clusters.append(merged)
    return sorted(clusters, key=lambda c: (-round(abs(np.mean(c)), 8), _angle_key(np.mean(c))))


def _angle_key(z: complex) -> float:
    theta = float(np.angle(z)) % (2 * np.pi)
    return 0.0 if theta > 2 * np.pi - 1e-8 else round(theta, 8)


def numerical_rank(a, tol: float) -> int:
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    return int(np.sum(s > tol))


def null_space(a, tol: float) -> np.ndarray:
    """Orthonormal basis of the numerical null space (columns)."""
    a = np.asarray(a)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def eigen_decompose(T, tol: float | None = None) -> EigenDecomposition:
    """Eigenvalues with multiplicities, eigenspaces and the Schur form of T.

    Examples
    --------
    >>> eigen_decompose(np.eye(3)).spectrum.eigenvalues[0].algebraic_multiplicity
    3
    """
    T = as_operator(T, tol)
    A = T.entries
    R, Z = schur(A)
    raw = np.diag(R).copy()
    norm = max(T.norm2(), 1e-300)
    rank_tol = T.tol * norm
    eigs = []
    vectors = {}
    for i, c in enumerate(cluster_values(raw)):
        lam = complex(np.mean(c))
        mult = len(c)
        semisimple = None
        basis = null_space(A - lam * np.eye(T.dim), rank_tol)
        if abs(lam) >= 1 - UNIMODULAR_TOL:
            semisimple = basis.shape[1] == mult
        eigs.append(Eigenvalue(lam, mult, semisimple))
        vectors[i] = basis
    radius = float(max(abs(raw))) if raw.size else 0.0
    return EigenDecomposition(Spectrum(tuple(eigs), radius), R, Z, raw, vectors)


def spectrum(T, tol: float | None = None) -> Spectrum:
    return eigen_decompose(T, tol).spectrum


# ------------------------------------------------------------ power bounds


@dataclass(frozen=True)
class PowerBoundedness:
    power_bounded: bool
    bound_estimate: float
    spectral_radius: float
    probe_horizon: int

    def __bool__(self):
        return self.power_bounded


def power_norms(T, horizon: int = POWER_PROBE, blowup: float = 1e12) -> np.ndarray:
    """Frobenius norms of T^1 .. T^horizon (truncated once they exceed ``blowup``)."""
    A = _array(T)
    P = np.eye(A.shape[0], dtype=complex)
    out = []
    for _ in range(horizon):
        P = P @ A
        nrm = np.linalg.norm(P)
        out.append(nrm)
        if nrm > blowup:
            break
    return np.array(out)


def is_power_bounded(T, tol: float | None = None, horizon: int = POWER_PROBE) -> PowerBoundedness:
    """Finite-dimensional power-boundedness test.

    True iff r(T) <= 1 + tol and every unimodular eigenvalue is semisimple,
    the latter decided by comparing rank(T - lambda I) (at tolerance
    tol * ||T||) with dim minus the algebraic multiplicity.  The bound
    estimate is the largest Frobenius norm of T^n over n <= ``horizon``.
    """
    T = as_operator(T, tol)
    spec = spectrum(T)
    ok = spec.spectral_radius <= 1 + T.tol and all(
        e.peripheral_semisimple is not False for e in spec.eigenvalues
    )
    norms = power_norms(T, horizon)
    return PowerBoundedness(bool(ok), float(norms.max()), spec.spectral_radius, horizon)


# --------------------------------------------------------- invariant split


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis stored as the columns of an (n, k) array."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2:
            raise InvalidInputError("basis must be a 2-d array of column vectors")
        object.__setattr__(self, "vectors", v)

    @property
    def dim_ambient(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def orthonormality_error(self) -> float:
        v = self.vectors
        return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1]))) if v.shape[1] else 0.0

    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T


def orthonormalize(a, tol: float = 1e-12) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape[1] == 0:
        return a
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1e-300)))
    return u[:, :rank]


def principal_angles(U, V) -> np.ndarray:
    """Principal angles between the column spans of orthonormal U and V."""
    U, V = np.asarray(U), np.asarray(V)
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros(0)
    s = np.linalg.svd(U.conj().T @ V, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))


@dataclass(frozen=True, eq=False)
class InvariantSplit:
    selected: SubspaceBasis
    complement: SubspaceBasis
    projector: np.ndarray  # oblique projector onto ``selected`` along ``complement``
    residual: float  # ||(I - P) T P||_2
    gap: float


def invariant_split(T, predicate: Callable[[complex], bool], tol: float | None = None,
                    min_gap: float = SPLIT_GAP) -> InvariantSplit:
    """Split C^n into the T-invariant subspaces belonging to the eigenvalues
    selected by ``predicate`` and to the remaining ones.

    The Schur form is reordered so the selected eigenvalues lead, then the
    off-diagonal block is removed with a Sylvester solve; the spectral
    projector is ``Z [[I, Y], [0, 0]] Z^H``.
    """
    T = as_operator(T, tol)
    A = T.entries
    n = T.dim
    R, Z = schur(A)
    diag = np.diag(R)
    sel = np.array([bool(predicate(z)) for z in diag])
    if sel.all() or not sel.any():
        gap = np.inf
    else:
        gap = float(np.min(np.abs(diag[sel][:, None] - diag[~sel][None, :])))
        if gap <= min_gap:
            raise IllConditionedSplitError(gap, min_gap)
    R, Z, k = reorder_schur(R, Z, predicate)
    Y = solve_triangular_sylvester(R[:k, :k], R[k:, k:], R[:k, k:])
    top = np.zeros((n, n), dtype=complex)
    top[:k, :k] = np.eye(k)
    top[:k, k:] = Y
    P = Z @ top @ Z.conj().T
    comp = Z @ np.vstack([-Y, np.eye(n - k)])
    comp = np.linalg.qr(comp)[0] if n - k else comp
    I = np.eye(n)
    residual = float(np.linalg.norm((I - P) @ A @ P, 2)) if n else 0.0
    return InvariantSplit(SubspaceBasis(Z[:, :k]), SubspaceBasis(comp), P, residual, gap)
