"""Finite-dimensional Köhler semigroup of a power-bounded matrix.

In C^n the closure of {T^n} is the set of limit points of the power sequence
together with the powers themselves.  It contains exactly one minimal
idempotent, the spectral projection onto the unimodular eigenspaces.  Two
independent routes to it are provided:

* :func:`minimal_idempotent_spectral` splits the Schur form;
* :func:`minimal_idempotent_dynamical` only looks at the powers: it picks the
  power T^n closest to being idempotent and purifies it with the cubic
  iteration ``Q <- 3Q^2 - 2Q^3``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapExceededError,
    HorizonError,
    InternalInconsistencyError,
    NotPowerBoundedError,
)
from .linalg import (
    UNIMODULAR_TOL,
    OperatorMatrix,
    as_operator,
    invariant_split,
    is_power_bounded,
)

DEFAULT_HORIZON = 256
DEFAULT_EPSILON = 1e-6
NET_CAP = 512
#: purification only starts when ||Q^2 - Q||_F is below this
PURIFICATION_BASIN = 0.1
#: certificate bounds on ProjectionMatrix
IDEMPOTENCY_BOUND = 1e-8
COMMUTATION_BOUND = 1e-8


def _fro(a) -> float:
    return float(np.linalg.norm(a))


def _require_power_bounded(T: OperatorMatrix):
    pb = is_power_bounded(T)
    if not pb:
        raise NotPowerBoundedError(
            f"operator is not power-bounded (r(T) = {pb.spectral_radius:.6g}, "
            f"max ||T^n||_F over n <= {pb.probe_horizon} = {pb.bound_estimate:.3g})"
        )
    return pb


def _powers(A: np.ndarray, count: int) -> np.ndarray:
    """Stack of A^1 .. A^count."""
    out = np.empty((count,) + A.shape, dtype=complex)
    cur = np.eye(A.shape[0], dtype=complex)
    for i in range(count):
        cur = cur @ A
        out[i] = cur
    return out


# ------------------------------------------------------------- orbit closure


@dataclass(frozen=True, eq=False)
class SemigroupApprox:
    """Epsilon-net of the power orbit {T^n : 1 <= n <= horizon}.

    ``representatives[i]`` is the first power ``T^rep_power[i]`` that opened a
    new net cell; ``index_of[n - 1]`` is the cell of ``T^n``.
    """

    base: OperatorMatrix
    horizon: int
    epsilon: float
    representatives: list
    rep_power: list
    index_of: np.ndarray
    product_residual: float
    product_closed: bool

    @property
    def size(self) -> int:
        return len(self.representatives)

    def distance_to(self, M) -> float:
        """Frobenius distance from ``M`` to the nearest representative."""
        return min(_fro(R - M) for R in self.representatives)


def orbit_closure(T, N: int = DEFAULT_HORIZON, epsilon: float = DEFAULT_EPSILON,
                  cap: int = NET_CAP) -> SemigroupApprox:
    """Greedy epsilon-net of the first ``N`` powers of a power-bounded ``T``.

    Besides the net itself the result records a product-closure check: for
    representatives ``T^a`` and ``T^b`` with ``a + b <= N`` the product lies
    within ``3 * epsilon`` of some representative.
    """
    T = as_operator(T)
    _require_power_bounded(T)
    reps: list[np.ndarray] = []
    rep_power: list[int] = []
    index_of = np.empty(N, dtype=int)
    stack = np.zeros((0,) + T.entries.shape, dtype=complex)
    cur = np.eye(T.dim, dtype=complex)
    for n in range(1, N + 1):
        cur = cur @ T.entries
        if len(reps):
            d = np.linalg.norm((stack - cur).reshape(len(reps), -1), axis=1)
            j = int(np.argmin(d))
            if d[j] < epsilon:
                index_of[n - 1] = j
                continue
        if len(reps) >= cap:
            raise CapExceededError(
                f"epsilon-net exceeds {cap} representatives; try a larger epsilon than {epsilon:g}"
            )
        reps.append(cur.copy())
        rep_power.append(n)
        stack = np.concatenate([stack, cur[None]], axis=0)
        index_of[n - 1] = len(reps) - 1

    worst = 0.0
    for a, Ra in zip(rep_power, reps):
        for b, Rb in zip(rep_power, reps):
            if a + b > N:
                continue
            prod = Ra @ Rb
            d = np.linalg.norm((stack - prod).reshape(len(reps), -1), axis=1)
            worst = max(worst, float(d.min()))
    return SemigroupApprox(T, N, epsilon, reps, rep_power, index_of, worst, worst <= 3 * epsilon)


def commutation_report(S: SemigroupApprox) -> list[float]:
    """``||R T - T R||_F`` for every representative R of the net."""
    A = S.base.entries
    return [_fro(R @ A - A @ R) for R in S.representatives]


# ------------------------------------------------------------- idempotents


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """An idempotent in the closure of the power orbit, with certificates.

    ``membership_witness`` is either the string ``"spectral"`` or a list of
    ``(n, ||T^n - P||_F)`` pairs along a doubling sequence of powers.
    """

    P: np.ndarray
    idempotency_residual: float
    commutation_residual: float
    membership_witness: object
    purification_history: tuple = field(default=())

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.P).real))

    def certified(self, T) -> bool:
        A = as_operator(T).entries
        nP = _fro(self.P)
        return (self.idempotency_residual <= IDEMPOTENCY_BOUND * (1 + nP)
                and self.commutation_residual <= COMMUTATION_BOUND * (1 + nP * _fro(A)))


def _certify(A: np.ndarray, P: np.ndarray, witness, history=()) -> ProjectionMatrix:
    proj = ProjectionMatrix(P, _fro(P @ P - P), _fro(P @ A - A @ P), witness, tuple(history))
    if not proj.certified(A):
        raise InternalInconsistencyError(
            f"idempotent failed certification (||P^2-P|| = {proj.idempotency_residual:.2e}, "
            f"||PT-TP|| = {proj.commutation_residual:.2e})"
        )
    return proj


def as_projection(T, P) -> ProjectionMatrix:
    """Wrap a raw matrix as a certified projection for ``T``."""
    if isinstance(P, ProjectionMatrix):
        return P
    return _certify(as_operator(T).entries, np.asarray(P, dtype=complex), "given")


def minimal_idempotent_spectral(T) -> ProjectionMatrix:
    """Spectral projection onto the unimodular eigenspaces along the rest."""
    T = as_operator(T)
    _require_power_bounded(T)
    split = invariant_split(T, lambda z: abs(z) >= 1 - UNIMODULAR_TOL)
    return _certify(T.entries, split.projector, "spectral")


def purify(Q, target: float = 0.0, max_iter: int = 100):
    """Cubic projector purification ``Q <- 3Q^2 - 2Q^3``.

    Stops once ``||Q^2 - Q||_F <= target`` or as soon as the residual stops
    decreasing, so the returned history is strictly decreasing.
    """
    Q = np.array(Q, dtype=complex)
    history = [_fro(Q @ Q - Q)]
    for _ in range(max_iter):
        if history[-1] <= target:
            break
        Q2 = Q @ Q
        nxt = 3 * Q2 - 2 * Q2 @ Q
        r = _fro(nxt @ nxt - nxt)
        if not r < history[-1]:
            break
        Q = nxt
        history.append(r)
    return Q, history


def minimal_idempotent_dynamical(T, N: int = DEFAULT_HORIZON) -> ProjectionMatrix:
    """Minimal idempotent from the power sequence alone.

    Searches ``n <= N`` for the smallest ``||T^{2n} - T^n||_F`` (ties within
    ``1e-12 * max(1, ||T||_F)`` go to the smallest n), then purifies ``T^n``.
    """
    T = as_operator(T)
    _require_power_bounded(T)
    A = T.entries
    pw = _powers(A, 2 * N)
    n_idx = np.arange(1, N + 1)
    dist = np.linalg.norm((pw[2 * n_idx - 1] - pw[n_idx - 1]).reshape(N, -1), axis=1)
    best = float(dist.min())
    if best >= PURIFICATION_BASIN:
        raise HorizonError(
            f"no n <= {N} has ||T^2n - T^n||_F < {PURIFICATION_BASIN} (best {best:.3g}); "
            "increase the horizon"
        )
    tie = 1e-12 * max(1.0, _fro(A))
    n = int(n_idx[np.flatnonzero(dist <= best + tie)[0]])
    Q = pw[n - 1]
    P, history = purify(Q, target=1e-14 * (1 + _fro(Q)))

    witness = []
    cur, k = Q, n
    for _ in range(4):
        witness.append((k, _fro(cur - P)))
        cur, k = cur @ cur, 2 * k
    # powers of T must approach P along the doubling sequence; if they drift
    # away, purification rounded a slowly decaying direction up to 1
    if witness[-1][1] > max(witness[0][1], 1e-10 * (1 + _fro(P))):
        raise HorizonError(
            f"powers T^{n}, ..., T^{witness[-1][0]} move away from the purified idempotent "
            f"({witness[0][1]:.3g} -> {witness[-1][1]:.3g}); increase the horizon"
        )
    return _certify(A, P, witness, history)


# ------------------------------------------------------- inverse on E_rev


@dataclass(frozen=True, eq=False)
class RevInverse:
    """Inverse of T on im P realised as ``J = T^(m-1) P`` inside the closure."""

    J: np.ndarray
    return_time: int
    return_residual: float
    left_residual: float  # ||T J - P||_F
    right_residual: float  # ||J T - P||_F
    absorb_residual: float  # max(||JP - J||, ||PJ - J||)
    direct_difference: float  # distance to B T_rev^{-1} B^H P


INVERSE_BOUND = 1e-6


def inverse_on_rev(T, P, N: int = 1000) -> RevInverse:
    """Inverse of ``T`` restricted to ``im P``.

    Picks the smallest ``m <= N`` with ``T^m P`` back at ``P`` (relative
    residual below 1e-10, else the best m if within 1e-6) and returns
    ``J = T^(m-1) P``.  ``J`` is cross-checked against inverting ``T`` on an
    orthonormal basis of ``im P``.
    """
    T = as_operator(T)
    A = T.entries
    Pm = P.P if isinstance(P, ProjectionMatrix) else np.asarray(P, dtype=complex)
    nP = _fro(Pm)
    cur = Pm.copy()
    resid = np.empty(N)
    for m in range(1, N + 1):
        cur = A @ cur
        resid[m - 1] = _fro(cur - Pm)
    hits = np.flatnonzero(resid <= 1e-10 * (1 + nP))
    if hits.size:
        m = int(hits[0]) + 1
    else:
        m = int(np.argmin(resid)) + 1
        if resid[m - 1] > INVERSE_BOUND:
            raise HorizonError(
                f"T^m P never returns to P for m <= {N} (best residual {resid[m - 1]:.3g} at m = {m})"
            )
    J = np.linalg.matrix_power(A, m - 1) @ Pm

    u, s, _ = np.linalg.svd(Pm)
    k = int(np.sum(s > 0.5))
    if k:
        B = u[:, :k]
        T_rev = B.conj().T @ A @ B
        if np.linalg.cond(T_rev) > 1e12:
            raise InternalInconsistencyError("T restricted to im P is numerically singular")
        J_direct = B @ np.linalg.solve(T_rev, B.conj().T @ Pm)
        direct = _fro(J - J_direct)
    else:
        direct = _fro(J)
    out = RevInverse(
        J, m, float(resid[m - 1]),
        _fro(A @ J - Pm), _fro(J @ A - Pm),
        max(_fro(J @ Pm - J), _fro(Pm @ J - J)), direct,
    )
    if max(out.left_residual, out.right_residual) > INVERSE_BOUND:
        raise HorizonError(f"inverse residual {max(out.left_residual, out.right_residual):.3g} "
                           f"exceeds {INVERSE_BOUND} at return time {m}")
    return out
