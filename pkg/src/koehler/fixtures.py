"""Canonical operators used by the verification suites.

Families
--------
cyclic_shift         k x k cyclic permutation (finite stand-in for periodic sequences)
nilpotent_shift      k x k strict shift (finite stand-in for c_0 sequences)
rotation_contraction rotation blocks by rational angles (+) contractive diagonal
root_of_unity        diag(exp(2 pi i j / k), contractions)
random_power_bounded S D S^-1, D = roots of unity (+) contractive triangular block
random_nonnegative   nonnegative matrix with prescribed strongly connected
                     components and periods, normalised to spectral radius 1
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import InvalidInputError, KoehlerError
from .graph import nonnegative_radius, perron_radius
from .linalg import OperatorMatrix

TWO_PI = 2 * np.pi
COND_BOUND = 50.0
MAX_ATTEMPTS = 100


class InfeasibleFixtureError(KoehlerError):
    pass


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    family: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Fixture:
    spec: FixtureSpec
    seed: int | None
    operator: OperatorMatrix
    expected: dict

    @property
    def T(self) -> np.ndarray:
        return self.operator.entries


def _roots_angles(orders) -> list[float]:
    return sorted({round(float(TWO_PI * j / h) % TWO_PI, 12) for h in orders for j in range(h)})


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def cyclic_shift(k: int) -> np.ndarray:
    return np.roll(np.eye(k), 1, axis=0)


def nilpotent_shift(k: int) -> np.ndarray:
    return np.eye(k, k=1)


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _block_diag(*blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    dtype = complex if any(np.iscomplexobj(b) for b in blocks) else float
    out = np.zeros((n, n), dtype=dtype)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _rotation_contraction(turns=(Fraction(1, 5),), rates=(0.3,)):
    turns = [_frac(t) for t in turns]
    blocks = [rotation(float(TWO_PI * t)) for t in turns]
    if rates:
        blocks.append(np.diag(np.asarray(rates, dtype=float)))
    T = _block_diag(*blocks)
    orders = [t.denominator for t in turns]
    angles = sorted({float(TWO_PI * (s * t % 1)) for t in turns for s in (1, -1)})
    return T, dict(power_bounded=True, positive=False, rev_dim=2 * len(turns),
                   peripheral_angles=angles, orders=orders)


def _root_of_unity(k: int = 3, j: int = 1, rates=(0.5,)):
    lam = np.exp(2j * np.pi * j / k)
    T = np.diag(np.concatenate([[lam], np.asarray(rates, dtype=complex)]))
    order = k // gcd(j, k)
    return T, dict(power_bounded=True, positive=False, rev_dim=1,
                   peripheral_angles=[float(TWO_PI * j / k) % TWO_PI], orders=[order])


def random_power_bounded(n: int, rng, max_order: int = 6, contraction: float = 0.6,
                         n_unimodular: int | None = None):
    """S D S^-1 with D = roots of unity (+) strictly contractive triangular block.

    S = I + G / sqrt(n) with complex Gaussian G, resampled until cond(S) <= 50.
    """
    k = int(rng.integers(1, n)) if n_unimodular is None and n > 1 else (
        n if n_unimodular is None else n_unimodular)
    orders = [int(rng.integers(1, max_order + 1)) for _ in range(k)]
    numerators = [int(rng.integers(0, q)) for q in orders]
    uni = np.exp(2j * np.pi * np.array(numerators) / np.array(orders))
    m = n - k
    C = np.zeros((m, m), dtype=complex)
    if m:
        mods = rng.uniform(0.0, contraction, size=m)
        C[np.diag_indices(m)] = mods * np.exp(1j * rng.uniform(0, TWO_PI, size=m))
        C += np.triu(0.3 * (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))), 1)
    D = _block_diag(np.diag(uni), C) if m else np.diag(uni)
    for _ in range(MAX_ATTEMPTS):
        G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        S = np.eye(n) + G / np.sqrt(2 * n)
        if np.linalg.cond(S) <= COND_BOUND:
            break
    else:
        raise InfeasibleFixtureError(f"no similarity with cond <= {COND_BOUND} in {MAX_ATTEMPTS} draws")
    T = S @ D @ np.linalg.inv(S)
    actual_orders = [q // gcd(j, q) for j, q in zip(numerators, orders)]
    return T, dict(power_bounded=True, positive=False, rev_dim=k,
                   peripheral_angles=sorted({round(float(np.angle(u)) % TWO_PI, 12) for u in uni}),
                   orders=actual_orders, lcm=_lcm(actual_orders), cond=float(np.linalg.cond(S)),
                   unimodular=[complex(u) for u in uni])


def _irreducible_block(size: int, h: int, rng) -> np.ndarray:
    """Random irreducible nonnegative matrix whose cycle lengths have gcd exactly h.

    Vertices are split into h nonempty classes with edges only from class c to
    class c + 1 (mod h); a base cycle of length h through one vertex per class
    pins the gcd to h, and every other vertex gets an in- and an out-edge so
    the block is strongly connected.
    """
    cls = list(range(h)) + [int(c) for c in rng.integers(0, h, size=size - h)]
    members = [[v for v in range(size) if cls[v] == c] for c in range(h)]
    A = np.zeros((size, size))

    def w():
        return rng.uniform(0.1, 1.0)

    for c in range(h):
        A[c, (c + 1) % h] = w()
    for v in range(h, size):
        c = cls[v]
        # attach v to vertices < v, which are already strongly connected
        A[rng.choice([u for u in members[(c - 1) % h] if u < v]), v] = w()
        A[v, rng.choice([u for u in members[(c + 1) % h] if u < v])] = w()
    density = rng.uniform(0.0, 0.6)
    for u in range(size):
        for v in range(size):
            if cls[v] == (cls[u] + 1) % h and A[u, v] == 0 and rng.random() < density:
                A[u, v] = w()
    return A


def random_nonnegative(n: int, rng, max_contraction: float = 0.8):
    """Nonnegative, power-bounded, spectral radius 1.

    Strongly connected components are either *basic* (Perron radius 1, period
    h) or contractive (radius in [0.1, 0.8]) or a single vertex without loop.
    Off-diagonal coupling only leaves non-basic components and only goes
    forward in a fixed component order, so no path joins two basic
    components and the peripheral eigenvalues stay semisimple.
    """
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    kinds = []
    for s in sizes:
        u = rng.random()
        kinds.append("basic" if u < 0.55 else ("zero" if s == 1 and u > 0.9 else "contractive"))
    if "basic" not in kinds:
        kinds[int(rng.integers(len(kinds)))] = "basic"
    order = rng.permutation(len(sizes))
    offsets = np.cumsum([0] + sizes)
    T = np.zeros((n, n))
    periods = []
    for idx, (s, kind) in enumerate(zip(sizes, kinds)):
        lo, hi = offsets[idx], offsets[idx + 1]
        if kind == "zero":
            continue
        h = int(rng.integers(1, s + 1)) if rng.random() < 0.7 else 1
        B = _irreducible_block(s, h, rng)
        if h == 1 and not np.any(np.diag(B)):
            B[0, 0] = rng.uniform(0.1, 1.0)
        target = 1.0 if kind == "basic" else rng.uniform(0.1, max_contraction)
        B *= target / perron_radius(B)
        T[lo:hi, lo:hi] = B
        if kind == "basic":
            periods.append(h)
    rank = {int(c): i for i, c in enumerate(order)}
    for a in range(len(sizes)):
        if kinds[a] == "basic":
            continue
        for b in range(len(sizes)):
            if a == b or rank[a] >= rank[b]:
                continue
            for u in range(offsets[a], offsets[a + 1]):
                for v in range(offsets[b], offsets[b + 1]):
                    if rng.random() < 0.25:
                        T[u, v] = rng.uniform(0.05, 0.5)
    perm = rng.permutation(n)
    T = T[np.ix_(perm, perm)]
    T = T / nonnegative_radius(T)
    return T, dict(power_bounded=True, positive=True, rev_dim=int(sum(periods)),
                   periods=sorted(periods), peripheral_angles=_roots_angles(periods))


def _validate_gap(T: np.ndarray, expected: dict, gap: float = 1e-3) -> bool:
    """Non-peripheral eigenvalues must stay ``gap`` inside the unit circle."""
    ev = np.abs(np.linalg.eigvals(T))
    return int(np.sum(ev > 1 - gap)) == expected["rev_dim"] and bool(np.all(ev < 1 + 1e-9))


def build(spec: FixtureSpec, seed: int | None = None) -> Fixture:
    """Deterministic operator and expected metadata for a fixture spec."""
    p = dict(spec.params)
    fam = spec.family
    if fam == "cyclic_shift":
        k = p.get("k", 5)
        T, exp = cyclic_shift(k), dict(power_bounded=True, positive=True, rev_dim=k,
                                       peripheral_angles=_roots_angles([k]), orders=[k])
    elif fam == "nilpotent_shift":
        T, exp = nilpotent_shift(p.get("k", 4)), dict(power_bounded=True, positive=True,
                                                      rev_dim=0, peripheral_angles=[])
    elif fam == "identity":
        k = p.get("k", 3)
        T, exp = np.eye(k), dict(power_bounded=True, positive=True, rev_dim=k,
                                 peripheral_angles=[0.0], orders=[1])
    elif fam == "rotation_contraction":
        T, exp = _rotation_contraction(p.get("turns", (Fraction(1, 5),)), p.get("rates", (0.3,)))
    elif fam == "root_of_unity":
        T, exp = _root_of_unity(p.get("k", 3), p.get("j", 1), p.get("rates", (0.5,)))
    elif fam in ("random_power_bounded", "random_nonnegative"):
        rng = np.random.default_rng(0 if seed is None else seed)
        n = p.get("n") or int(rng.integers(2, p.get("max_n", 12) + 1))
        gen = random_power_bounded if fam == "random_power_bounded" else random_nonnegative
        extra = {k: v for k, v in p.items() if k not in ("n", "max_n")}
        for _ in range(MAX_ATTEMPTS):
            T, exp = gen(n, rng, **extra)
            if _validate_gap(T, exp):
                break
        else:
            raise InfeasibleFixtureError(f"{spec.name}: no draw passed the spectral-gap validation")
    else:
        raise InvalidInputError(f"unknown fixture family {fam!r}")
    exp = dict(exp, dim=int(T.shape[0]))
    return Fixture(spec, seed, OperatorMatrix(T), exp)


REGISTRY = {
    s.name: s for s in [
        FixtureSpec("identity3", "identity", {"k": 3}),
        FixtureSpec("cyclic_shift5", "cyclic_shift", {"k": 5}),
        FixtureSpec("cyclic_shift3", "cyclic_shift", {"k": 3}),
        FixtureSpec("nilpotent_shift4", "nilpotent_shift", {"k": 4}),
        FixtureSpec("rotation5_contraction", "rotation_contraction",
                    {"turns": (Fraction(1, 5),), "rates": (0.3,)}),
        FixtureSpec("rotations_3_4", "rotation_contraction",
                    {"turns": (Fraction(1, 3), Fraction(1, 4)), "rates": (0.5, 0.2)}),
        FixtureSpec("root_of_unity_3", "root_of_unity", {"k": 3, "j": 1, "rates": (0.5,)}),
        FixtureSpec("root_of_unity_3_7", "root_of_unity", {"k": 7, "j": 3, "rates": ()}),
        FixtureSpec("mixed", "random_power_bounded", {"max_n": 12}),
        FixtureSpec("nonnegative", "random_nonnegative", {"max_n": 10}),
    ]
}


def get(name: str, seed: int | None = None) -> Fixture:
    try:
        spec = REGISTRY[name]
    except KeyError:
        raise InvalidInputError(f"unknown fixture {name!r}; known: {sorted(REGISTRY)}") from None
    return build(spec, seed)


def power_bounded_battery(count: int, seed: int, max_n: int = 12) -> list[Fixture]:
    """``count`` random power-bounded fixtures; fixture i uses seed ``seed * 100003 + i``."""
    spec = FixtureSpec("mixed", "random_power_bounded", {"max_n": max_n})
    return [build(spec, seed * 100003 + i) for i in range(count)]


def nonnegative_battery(count: int, seed: int, max_n: int = 10) -> list[Fixture]:
    spec = FixtureSpec("nonnegative", "random_nonnegative", {"max_n": max_n})
    return [build(spec, seed * 100003 + i) for i in range(count)]


def rational_rotation_battery() -> list[Fixture]:
    """Fixtures whose unimodular eigenvalues are all roots of unity of order <= 12."""
    out = [get(n) for n in ("identity3", "cyclic_shift3", "cyclic_shift5", "rotation5_contraction",
                            "rotations_3_4", "root_of_unity_3", "root_of_unity_3_7")]
    for k in range(1, 13):
        for j in range(k):
            if gcd(j, k) == 1:
                out.append(build(FixtureSpec(f"root_{j}_{k}", "root_of_unity",
                                             {"k": k, "j": j, "rates": (0.4,)})))
    return out
