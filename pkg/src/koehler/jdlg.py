"""Reversible/stable splitting E = im P (+) ker P and its verification.

Each ``verify_*`` function returns a :class:`~koehler.report.CheckReport`
covering one clause of the decomposition.  Where finite dimension
forces a stronger statement (accumulation at 0 becomes convergence to 0,
recurrence becomes exact periodic return for roots of unity) the stronger
form is what gets checked, and the report notes it.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .engine import ProjectionMatrix, SemigroupApprox, as_projection
from .errors import HorizonError, IllConditionedProjectionError
from .linalg import UNIMODULAR_TOL, SubspaceBasis, as_operator, eigen_decompose, principal_angles
from .report import CheckReport

INVARIANCE_BOUND = 1e-8
EIGENVECTOR_BOUND = 1e-6
DECAY_BOUND = 1e-6
INVERSE_BOUND = 1e-8


@dataclass(frozen=True, eq=False)
class Decomposition:
    P: ProjectionMatrix
    rev_basis: SubspaceBasis
    aws_basis: SubspaceBasis
    T_rev: np.ndarray
    T_rev_inverse: np.ndarray
    singular_values: np.ndarray

    @property
    def dim(self) -> int:
        return self.rev_basis.dim_ambient

    @property
    def rev_dim(self) -> int:
        return self.rev_basis.dim

    @property
    def aws_dim(self) -> int:
        return self.aws_basis.dim

    def invariant_residuals(self) -> dict:
        P = self.P.P
        V, W = self.rev_basis.vectors, self.aws_basis.vectors
        k = self.rev_dim
        return {
            "rev_fixed": float(np.linalg.norm(P @ V - V, 2)) if k else 0.0,
            "aws_killed": float(np.linalg.norm(P @ W, 2)) if self.aws_dim else 0.0,
            "inverse": float(np.linalg.norm(self.T_rev @ self.T_rev_inverse - np.eye(k), 2)) if k else 0.0,
        }


def _rank_cut(s: np.ndarray, tol: float) -> int:
    """Rank of P at the largest logarithmic gap in its singular values."""
    n = s.size
    if n == 0 or s[0] <= 10 * tol:
        return 0
    floor = np.finfo(float).eps * s[0]
    logs = np.log(np.maximum(np.append(s, 0.0), floor))
    return int(np.argmax(logs[:-1] - logs[1:])) + 1


def decompose(T, P) -> Decomposition:
    """Split C^n into ``im P`` and ``ker P`` from the SVD of P.

    Raises :class:`IllConditionedProjectionError` when a singular value of
    P sits in the ambiguous band between ``10 * tol * (1 + ||P||)`` and 1/2
    (a genuine projection has only zeros and values >= 1).
    """
    T = as_operator(T)
    P = as_projection(T, P)
    u, s, vh = np.linalg.svd(P.P)
    lo = 10 * T.tol * (1 + s[0])
    ambiguous = s[(s > lo) & (s < 0.5)]
    if ambiguous.size:
        raise IllConditionedProjectionError(
            f"singular values {ambiguous} of P are neither ~0 nor >= 1; rank is ambiguous"
        )
    k = _rank_cut(s, T.tol)
    B = u[:, :k]
    W = vh[k:].conj().T
    T_rev = B.conj().T @ T.entries @ B
    T_rev_inv = np.linalg.inv(T_rev) if k else np.zeros((0, 0), complex)
    return Decomposition(P, SubspaceBasis(B), SubspaceBasis(W), T_rev, T_rev_inv, s)


def subspace_angles(D1: Decomposition, D2: Decomposition) -> dict:
    """Largest principal angle between matching parts of two decompositions."""
    out = {}
    for name in ("rev_basis", "aws_basis"):
        U, V = getattr(D1, name).vectors, getattr(D2, name).vectors
        if U.shape[1] != V.shape[1]:
            out[name] = np.pi / 2
        else:
            ang = principal_angles(U, V)
            out[name] = float(ang.max()) if ang.size else 0.0
    return out


def verify_invariance(D: Decomposition, T, S: SemigroupApprox | None = None) -> CheckReport:
    """Both parts are invariant under T and under every power in ``S``."""
    T = as_operator(T)
    A = T.entries
    P = D.P.P
    I = np.eye(T.dim)
    rep = CheckReport("invariance")
    bound = INVARIANCE_BOUND * max(T.norm2(), 1e-300)
    rep.add("rev_leak", np.linalg.norm((I - P) @ A @ P, 2), bound)
    rep.add("aws_leak", np.linalg.norm(P @ A @ (I - P), 2), bound)
    if S is not None:
        for n, R in zip(S.rep_power, S.representatives):
            b = INVARIANCE_BOUND * max(1.0, np.linalg.norm(R, 2))
            rep.add("closure_rev_leak", np.linalg.norm((I - P) @ R @ P, 2), b)
            rep.add("closure_aws_leak", np.linalg.norm(P @ R @ (I - P), 2), b)
        rep.certificates["closure_size"] = S.size
    inv = D.invariant_residuals()["inverse"]
    rep.add("rev_inverse", inv, INVERSE_BOUND)
    return rep


def verify_unimodular_eigenvectors(D: Decomposition, T) -> CheckReport:
    """Every eigenvector for |lambda| = 1 is fixed by P."""
    T = as_operator(T)
    P = D.P.P
    eig = eigen_decompose(T)
    rep = CheckReport("unimodular_eigenvectors")
    count = 0
    for i, e in enumerate(eig.spectrum.eigenvalues):
        if abs(e.value) < 1 - UNIMODULAR_TOL:
            continue
        V = eig.eigenvectors[i]
        for v in V.T:
            nv = np.linalg.norm(v)
            rep.add("fixed_by_P", np.linalg.norm(P @ v - v) / nv, EIGENVECTOR_BOUND)
            rep.add("eigen_residual", np.linalg.norm(T.entries @ v - e.value * v) / nv,
                    T.tol * max(T.norm2(), 1e-300))
            count += 1
    rep.certificates["eigenvectors_checked"] = count
    if not count:
        rep.notes.append("no unimodular eigenvalues; clause holds vacuously")
    return rep


def _decay_onset(norms: np.ndarray, bound: float) -> int | None:
    """Smallest n (1-based) from which ``norms`` stays <= bound, else None."""
    above = np.flatnonzero(norms > bound)
    if above.size == 0:
        return 1
    if above[-1] == norms.size - 1:
        return None
    return int(above[-1]) + 2


def verify_stability(D: Decomposition, T, N: int = 1000, samples: int = 8,
                     seed: int = 0) -> CheckReport:
    """Vectors of ker P decay to 0; sampled decaying vectors lie in ker P.

    Finite-dimensional sharpening: on ker P the spectrum is inside the open
    disk, so "0 is an accumulation point of the orbit" is checked as
    ``||T^n w|| <= 1e-6`` for all ``N0 <= n <= N``.
    """
    T = as_operator(T)
    A = T.entries
    P = D.P.P
    rep = CheckReport("stability")
    rep.notes.append("accumulation at 0 checked in the stronger form of convergence to 0")
    W = D.aws_basis.vectors
    if W.shape[1]:
        X = W.copy()
        sub_norms = np.empty(N)
        col_norms = np.empty((N, W.shape[1]))
        for n in range(N):
            X = A @ X
            sub_norms[n] = np.linalg.norm(X, 2)
            col_norms[n] = np.linalg.norm(X, axis=0)
        onset = _decay_onset(sub_norms, DECAY_BOUND)
        if onset is None:
            raise HorizonError(
                f"ker P has not decayed below {DECAY_BOUND} within N = {N} "
                f"(||T^N|_ker P|| = {sub_norms[-1]:.3g})"
            )
        rep.certificates["N0"] = onset
        rep.certificates["N0_per_vector"] = [_decay_onset(c, DECAY_BOUND) for c in col_norms.T]
        rep.add("tail_norm", sub_norms[onset - 1:].max(), DECAY_BOUND)
    else:
        rep.certificates["N0"] = 0
        rep.notes.append("ker P = {0}; decay clause holds vacuously")

    rng = np.random.default_rng(seed)
    decaying = 0
    for i in range(samples):
        z = rng.normal(size=T.dim) + 1j * rng.normal(size=T.dim)
        x = z - P @ z if i % 2 else z
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        tail = np.linalg.norm(np.linalg.matrix_power(A, N) @ x) / nx
        if tail <= DECAY_BOUND:
            decaying += 1
            rep.add("decaying_sample_in_ker", np.linalg.norm(P @ x) / nx, DECAY_BOUND)
    rep.certificates["decaying_samples"] = decaying
    return rep


def return_set(A: np.ndarray, x: np.ndarray, epsilon: float, N: int) -> list[int]:
    out = []
    y = x.copy()
    for n in range(1, N + 1):
        y = A @ y
        if np.linalg.norm(y - x) < epsilon:
            out.append(n)
    return out


def verify_rev_recurrence(D: Decomposition, T, epsilon: float = 1e-6,
                          N: int = 1000) -> CheckReport:
    """Each vector of the rev basis returns epsilon-close to itself."""
    T = as_operator(T)
    rep = CheckReport("rev_recurrence")
    rep.notes.append("recurrence checked as a nonempty return set with finite gaps on [1, N]")
    first, gaps, periods = [], [], []
    for x in D.rev_basis.vectors.T:
        R = return_set(T.entries, x, epsilon, N)
        if not R:
            spec = eigen_decompose(T).spectrum
            turns = [float(np.angle(e.value) / (2 * np.pi)) % 1.0 for e in spec.eigenvalues
                     if abs(e.value) >= 1 - UNIMODULAR_TOL]
            raise HorizonError(
                f"no return within epsilon = {epsilon:g} for n <= {N}; "
                f"unimodular eigenvalue angles (in turns): {turns}"
            )
        diffs = np.diff([0] + R)
        first.append(R[0])
        gaps.append(int(diffs.max()))
        g = 0
        for r in R:
            g = gcd(g, r)
        periods.append(g)
    rep.certificates.update(first_return=first, max_gap=gaps, return_gcd=periods)
    if not first:
        rep.notes.append("im P = {0}; recurrence holds vacuously")
    return rep


def verify_all(D: Decomposition, T, S: SemigroupApprox | None = None, N: int = 1000,
               epsilon: float = 1e-6) -> list[CheckReport]:
    return [
        verify_invariance(D, T, S),
        verify_unimodular_eigenvectors(D, T),
        verify_stability(D, T, N),
        verify_rev_recurrence(D, T, epsilon, N),
    ]
