"""Positivity, induced lattice structure and peripheral-spectrum cyclicity.

The lattice is R^n with the coordinatewise order.  For a positive projection
P the range ``im P`` is again a vector lattice under

    sup_P(x, y) = P max(x, y),   inf_P(x, y) = P min(x, y),

and a positive power-bounded T acts on it as a lattice isomorphism.

Cyclicity is checked against an oracle that never touches eigenvalues: the
peripheral spectrum of a nonnegative matrix is the union of the h-th roots of
unity over the strongly connected components of maximal Perron radius, h the
gcd of the cycle lengths in that component.

On a finite set K the Markov lattice homomorphisms of C(K) are the
composition operators f -> f o phi.  They are multiplicative, so an
eigenvector x for lambda gives T(x^k) = (Tx)^k = lambda^k x^k.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import ProjectionMatrix, RevInverse
from .errors import InvalidInputError, NotPositiveError
from .graph import component_radii
from .linalg import UNIMODULAR_TOL, as_operator, eigen_decompose
from .report import CheckReport

TWO_PI = 2 * np.pi
TOL_ANGLE = 1e-6
LATTICE_HOM_BOUND = 1e-6
AXIOM_BOUND = 1e-8
MARKOV_BOUND = 1e-10
#: below this the spectral radius is treated as 0 (empty peripheral spectrum)
ZERO_RADIUS = 1e-8


@dataclass(frozen=True)
class ConeOrder:
    """Coordinatewise order on R^n embedded in C^n."""

    dim: int
    tol_pos: float = 1e-8

    def __post_init__(self):
        if not (0 < self.tol_pos <= 1e-4):
            raise InvalidInputError(f"tol_pos must lie in (0, 1e-4], got {self.tol_pos}")

    def is_positive(self, A) -> bool:
        A = np.asarray(A)
        return bool(np.all(A.real >= -self.tol_pos) and np.all(np.abs(A.imag) <= self.tol_pos))


def _proj(P) -> np.ndarray:
    return P.P if isinstance(P, ProjectionMatrix) else np.asarray(P, dtype=complex)


def _require_positive(A, order: ConeOrder, what: str):
    if not order.is_positive(A):
        A = np.asarray(A)
        raise NotPositiveError(
            f"{what} is not positive (min real entry {A.real.min():.3g}, "
            f"max |imag| {np.abs(A.imag).max():.3g})"
        )


def verify_positive_projection(T, P, order: ConeOrder) -> CheckReport:
    T = as_operator(T)
    _require_positive(T.entries, order, "T")
    Pm = _proj(P)
    rep = CheckReport("positive_projection")
    rep.add("negative_part", max(0.0, -float(Pm.real.min())), order.tol_pos)
    rep.add("imaginary_part", float(np.abs(Pm.imag).max()), order.tol_pos)
    return rep


def induced_lattice_ops(P, order: ConeOrder):
    """Return ``(sup_P, inf_P)`` acting on real vectors of ``im P``."""
    Pm = _proj(P)
    _require_positive(Pm, order, "P")
    Pr = Pm.real

    def sup_P(x, y):
        return Pr @ np.maximum(np.real(x), np.real(y))

    def inf_P(x, y):
        return Pr @ np.minimum(np.real(x), np.real(y))

    return sup_P, inf_P


def sample_range(P, count: int, rng) -> np.ndarray:
    """``count`` random real vectors of ``im P`` as rows."""
    Pr = _proj(P).real
    return (Pr @ rng.normal(size=(Pr.shape[0], count))).T


def verify_lattice_axioms(P, order: ConeOrder, samples: int = 100, seed: int = 0) -> CheckReport:
    """Commutativity, associativity, idempotency, absorption and closure on sampled triples."""
    sup, inf = induced_lattice_ops(P, order)
    Pr = _proj(P).real
    rng = np.random.default_rng(seed)
    X, Y, Z = (sample_range(P, samples, rng) for _ in range(3))
    rep = CheckReport("lattice_axioms")
    for x, y, z in zip(X, Y, Z):
        for name, op in (("sup", sup), ("inf", inf)):
            rep.add(f"{name}_commutative", np.abs(op(x, y) - op(y, x)).max(), AXIOM_BOUND)
            rep.add(f"{name}_associative", np.abs(op(op(x, y), z) - op(x, op(y, z))).max(), AXIOM_BOUND)
            rep.add(f"{name}_idempotent", np.abs(op(x, x) - x).max(), AXIOM_BOUND)
            rep.add(f"{name}_closed", np.abs(Pr @ op(x, y) - op(x, y)).max(), AXIOM_BOUND)
        rep.add("absorption_sup_inf", np.abs(sup(x, inf(x, y)) - x).max(), AXIOM_BOUND)
        rep.add("absorption_inf_sup", np.abs(inf(x, sup(x, y)) - x).max(), AXIOM_BOUND)
    rep.certificates["samples"] = samples
    return rep


def verify_lattice_isomorphism(T, P, order: ConeOrder, inverse: RevInverse | np.ndarray | None = None,
                               samples: int = 100, seed: int = 0) -> CheckReport:
    """T commutes with sup_P and inf_P on im P; its inverse there is positive."""
    T = as_operator(T)
    _require_positive(T.entries, order, "T")
    A = T.entries.real
    sup, inf = induced_lattice_ops(P, order)
    rng = np.random.default_rng(seed)
    X, Y = sample_range(P, samples, rng), sample_range(P, samples, rng)
    rep = CheckReport("lattice_isomorphism")
    for x, y in zip(X, Y):
        rep.add("sup_homomorphism", np.linalg.norm(A @ sup(x, y) - sup(A @ x, A @ y)), LATTICE_HOM_BOUND)
        rep.add("inf_homomorphism", np.linalg.norm(A @ inf(x, y) - inf(A @ x, A @ y)), LATTICE_HOM_BOUND)
    if inverse is not None:
        J = inverse.J if isinstance(inverse, RevInverse) else np.asarray(inverse)
        rep.add("inverse_negative_part", max(0.0, -float(J.real.min())), order.tol_pos)
        rep.add("inverse_imaginary_part", float(np.abs(J.imag).max()), order.tol_pos)
    rep.certificates["samples"] = samples
    return rep


# --------------------------------------------------------- peripheral spectrum


def _circ(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def cluster_angles(angles, tol: float = TOL_ANGLE) -> tuple[float, ...]:
    """Merge angles closer than ``tol`` on the circle; result sorted in [0, 2pi)."""
    out: list[float] = []
    for a in sorted(float(t) % TWO_PI for t in angles):
        if out and _circ(a, out[-1]) <= tol:
            continue
        out.append(a)
    if len(out) > 1 and _circ(out[0], out[-1]) <= tol:
        out.pop()
    out = [0.0 if a > TWO_PI - tol else a for a in out]
    return tuple(sorted(out))


@dataclass(frozen=True)
class PeripheralSpectrum:
    """Angles of the eigenvalues of modulus r(T), relative to r(T).

    A zero spectral radius gives an empty angle set by convention.
    """

    r: float
    angles: tuple
    tol_r: float = 0.0
    tol_angle: float = TOL_ANGLE
    components: tuple = field(default=(), compare=False)

    def matches(self, other: "PeripheralSpectrum", tol: float | None = None) -> bool:
        return angle_sets_equal(self.angles, other.angles, self.tol_angle if tol is None else tol)


def angle_sets_equal(a, b, tol: float = TOL_ANGLE) -> bool:
    return all(any(_circ(x, y) <= tol for y in b) for x in a) and \
        all(any(_circ(x, y) <= tol for y in a) for x in b)


def peripheral_spectrum(T, tol_r: float | None = None, tol_angle: float = TOL_ANGLE) -> PeripheralSpectrum:
    spec = eigen_decompose(T).spectrum
    r = spec.spectral_radius
    if tol_r is None:
        tol_r = 1e-8 * (1 + r)
    if r <= ZERO_RADIUS:
        return PeripheralSpectrum(0.0, (), tol_r, tol_angle)
    vals = spec.multiset()
    per = vals[np.abs(vals) >= r - tol_r]
    return PeripheralSpectrum(r, cluster_angles(np.angle(per), tol_angle), tol_r, tol_angle)


@dataclass(frozen=True)
class CyclicityCertificate:
    cyclic: bool
    K_max: int
    violations: tuple  # (theta, k) pairs whose multiple k*theta is missing

    def __bool__(self):
        return self.cyclic


def check_cyclicity(ps: PeripheralSpectrum, K_max: int) -> CyclicityCertificate:
    """Is k * theta (mod 2 pi) in the angle set for every angle theta and k <= K_max?"""
    bad = []
    for theta in ps.angles:
        for k in range(1, K_max + 1):
            t = (k * theta) % TWO_PI
            if not any(_circ(t, a) <= ps.tol_angle for a in ps.angles):
                bad.append((theta, k))
    return CyclicityCertificate(not bad, K_max, tuple(bad))


def frobenius_oracle(T, rel_tol: float = 1e-9) -> PeripheralSpectrum:
    """Predicted peripheral angles of a nonnegative matrix from its digraph.

    Components whose Perron radius is within ``rel_tol`` of the maximum
    contribute the h-th roots of unity, h their cycle-length gcd.
    """
    A = as_operator(T).entries
    if np.any(A.imag != 0) or np.any(A.real < 0):
        raise NotPositiveError("the Perron-Frobenius oracle needs an entrywise nonnegative real matrix")
    comps = component_radii(A.real)
    r = max((c[1] for c in comps), default=0.0)
    if r <= ZERO_RADIUS:
        return PeripheralSpectrum(0.0, (), 0.0, TOL_ANGLE, tuple(comps))
    angles = []
    basic = []
    for members, rc, h in comps:
        if rc >= r * (1 - rel_tol):
            basic.append((members, rc, h))
            angles.extend(TWO_PI * j / h for j in range(h))
    return PeripheralSpectrum(r, cluster_angles(angles), 0.0, TOL_ANGLE, tuple(basic))


def verify_restricted_peripheral(T, P) -> CheckReport:
    """The peripheral spectrum of T equals that of T restricted to im P.

    In finite dimension T restricted to the reversible part is the lattice
    isomorphism whose point spectrum carries the whole peripheral spectrum.
    """
    from .jdlg import decompose

    D = decompose(T, P)
    ps = peripheral_spectrum(T)
    rep = CheckReport("restricted_peripheral")
    if D.rev_dim == 0:
        if ps.angles and abs(ps.r - 1) <= ps.tol_r:
            rep.fail("unimodular spectrum present but im P = {0}")
        return rep
    ps_rev = peripheral_spectrum(D.T_rev)
    rep.add("radius_difference", abs(ps.r - ps_rev.r), ps.tol_r)
    if not ps.matches(ps_rev):
        rep.fail(f"angles of T {list(ps.angles)} != angles on im P {list(ps_rev.angles)}")
    rep.certificates["rev_dim"] = D.rev_dim
    return rep


# --------------------------------------------------------- C(K) mechanism


@dataclass(frozen=True)
class CompositionOperator:
    """``f -> f o phi`` on functions of the finite set {0, ..., m-1}."""

    point_map: tuple

    def __post_init__(self):
        phi = tuple(int(p) for p in self.point_map)
        m = len(phi)
        if m == 0 or any(not 0 <= p < m for p in phi):
            raise InvalidInputError(f"point map {self.point_map} is not a total self-map of {{0..m-1}}")
        object.__setattr__(self, "point_map", phi)

    @property
    def size(self) -> int:
        return len(self.point_map)

    def matrix(self) -> np.ndarray:
        M = np.zeros((self.size, self.size))
        M[np.arange(self.size), self.point_map] = 1.0
        return M


def _rref_rows(V: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Reduced row echelon form of the rows of V (basis change within their span)."""
    M = np.array(V, dtype=complex)
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = r + int(np.argmax(np.abs(M[r:, c])))
        if abs(M[piv, c]) <= tol:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] /= M[r, c]
        for i in range(rows):
            if i != r:
                M[i] -= M[i, c] * M[r]
        r += 1
    M[np.abs(M) <= tol] = 0
    return M[:r]


def markov_power_mechanism(C: CompositionOperator, K_max: int | None = None,
                           samples: int = 20, seed: int = 0) -> CheckReport:
    """Multiplicativity, the Markov property and T(x^k) = lambda^k x^k.

    Eigenspaces are brought to reduced row echelon form so that basis
    vectors live on single cycles; an eigenvector whose modulus is not
    constant on its support is skipped with a note.
    """
    M = C.matrix()
    m = C.size
    K_max = m if K_max is None else K_max
    rng = np.random.default_rng(seed)
    rep = CheckReport("markov_power_mechanism")
    for _ in range(samples):
        f, g = rng.normal(size=m), rng.normal(size=m)
        if not np.array_equal(M @ (f * g), (M @ f) * (M @ g)):
            rep.fail("multiplicativity violated")
            break
    one = np.ones(m)
    if not np.array_equal(M @ one, one):
        rep.fail("T1 != 1")

    eig = eigen_decompose(M)
    allvals = eig.raw_eigenvalues
    checked = 0
    for i, e in enumerate(eig.spectrum.eigenvalues):
        if abs(e.value) < 1 - UNIMODULAR_TOL:
            continue
        lam = e.value
        basis = _rref_rows(eig.eigenvectors[i].T)
        for x in basis:
            support = np.abs(x) > 1e-9
            mod = np.abs(x[support])
            if mod.max() - mod.min() > 1e-9 * mod.max():
                rep.notes.append(f"eigenvector for {lam:.6g} has non-constant modulus on its support; skipped")
                continue
            x = x / mod.max()
            for k in range(1, K_max + 1):
                xk = x ** k
                lk = lam ** k
                rep.add("power_eigen_residual", np.linalg.norm(M @ xk - lk * xk), MARKOV_BOUND)
                rep.add("power_in_spectrum", np.abs(allvals - lk).min(), MARKOV_BOUND)
            checked += 1
    rep.certificates.update(point_map=list(C.point_map), eigenvectors_checked=checked, K_max=K_max)
    return rep
