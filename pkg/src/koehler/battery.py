"""The acceptance battery: one check block per criterion, fully seeded.

Each ``criterion_*`` function returns a :class:`CheckReport` whose residuals
carry the acceptance thresholds, so ``status == "pass"`` is the verdict.
Nothing here reads the clock; timing is left to the caller so that two runs
with the same seed produce identical reports.
"""
from __future__ import annotations

import itertools

import numpy as np

from . import fixtures as fx
from .engine import inverse_on_rev, minimal_idempotent_dynamical, minimal_idempotent_spectral
from .ip import finite_sums, find_fs_sequence, verify_ip_recurrence
from .jdlg import decompose, verify_invariance, verify_stability, verify_unimodular_eigenvectors
from .lattice import (
    CompositionOperator,
    ConeOrder,
    angle_sets_equal,
    check_cyclicity,
    frobenius_oracle,
    markov_power_mechanism,
    peripheral_spectrum,
    verify_lattice_axioms,
    verify_lattice_isomorphism,
    verify_positive_projection,
    verify_restricted_peripheral,
)
from .report import CheckReport
from .semigroup import (
    center,
    from_cayley,
    idempotents,
    idempotents_by_powers,
    minidem_correspondence,
    minimal_ideals,
    rees_checks,
    transformation_semigroup,
)

POWER_BOUNDED_COUNT = 50
NONNEGATIVE_COUNT = 50
CYCLICITY_COUNT = 500
COMPOSITION_SAMPLES = 200
IP_ROUND_TRIPS = 100


def _fold(rep: CheckReport, sub: CheckReport, label: str) -> None:
    """Merge a sub-report into ``rep``, keeping the worst residual per key."""
    for k, v in sub.residuals.items():
        rep.add(f"{sub.name}.{k}", v, sub.thresholds[k])
    rep.failures.extend(f"{label}: {sub.name}: {m}" for m in sub.failures)


def criterion_idempotent_cross_oracle(seed: int = 0, count: int = POWER_BOUNDED_COUNT) -> CheckReport:
    """Spectral and dynamical minimal idempotents agree to 1e-6 * n."""
    rep = CheckReport("c1_idempotent_cross_oracle")
    for f in fx.power_bounded_battery(count, seed):
        n = f.operator.dim
        d = np.linalg.norm(minimal_idempotent_spectral(f.T).P - minimal_idempotent_dynamical(f.T).P)
        rep.add("P_difference_over_n", d / n, 1e-6)
    rep.certificates.update(fixtures=count, seed=seed)
    return rep


def criterion_decomposition(seed: int = 0, count: int = POWER_BOUNDED_COUNT) -> CheckReport:
    """Projection, invariance, inverse, eigenvector and decay residuals on the same fixtures."""
    rep = CheckReport("c2_decomposition")
    rev_dims = []
    for f in fx.power_bounded_battery(count, seed):
        A = f.T
        nT = np.linalg.norm(A, 2)
        P = minimal_idempotent_spectral(A)
        rep.add("idempotency", np.linalg.norm(P.P @ P.P - P.P, 2), 1e-8)
        rep.add("commutation_over_norm", np.linalg.norm(P.P @ A - A @ P.P, 2) / nT, 1e-8)
        D = decompose(A, P)
        label = f"seed {f.seed}"
        for sub in (verify_invariance(D, A), verify_unimodular_eigenvectors(D, A),
                    verify_stability(D, A)):
            _fold(rep, sub, label)
        if D.rev_dim != f.expected["rev_dim"]:
            rep.fail(f"{label}: rev dimension {D.rev_dim} != expected {f.expected['rev_dim']}")
        rev_dims.append(D.rev_dim)
    rep.certificates.update(fixtures=count, seed=seed, rev_dims=rev_dims)
    return rep


def criterion_positive(seed: int = 0, count: int = NONNEGATIVE_COUNT) -> CheckReport:
    """Positive projection, induced lattice, lattice isomorphism, positive inverse."""
    rep = CheckReport("c3_positive")
    for i, f in enumerate(fx.nonnegative_battery(count, seed)):
        A = f.T
        order = ConeOrder(f.operator.dim)
        P = minimal_idempotent_spectral(A)
        J = inverse_on_rev(A, P)
        label = f"seed {f.seed}"
        for sub in (verify_positive_projection(A, P, order),
                    verify_lattice_axioms(P, order, samples=100, seed=i),
                    verify_lattice_isomorphism(A, P, order, inverse=J, samples=100, seed=i),
                    verify_restricted_peripheral(A, P)):
            _fold(rep, sub, label)
    rep.certificates.update(fixtures=count, seed=seed)
    return rep


def criterion_cyclicity(seed: int = 0, count: int = CYCLICITY_COUNT) -> CheckReport:
    """Cyclic peripheral spectrum, equal to the graph-theoretic prediction."""
    rep = CheckReport("c4_cyclicity")
    periods = {}
    for f in fx.nonnegative_battery(count, seed):
        ps = peripheral_spectrum(f.T)
        cert = check_cyclicity(ps, f.operator.dim)
        if not cert:
            rep.fail(f"seed {f.seed}: not cyclic, missing multiples {list(cert.violations)}")
        oracle = frobenius_oracle(f.T)
        if not angle_sets_equal(ps.angles, oracle.angles, 1e-6):
            rep.fail(f"seed {f.seed}: eigenvalue angles {ps.angles} != oracle {oracle.angles}")
        for h in f.expected.get("periods", []):
            periods[h] = periods.get(h, 0) + 1
    rep.certificates.update(fixtures=count, seed=seed,
                            basic_periods={str(h): c for h, c in sorted(periods.items())})
    return rep


def composition_maps(seed: int = 0, samples: int = COMPOSITION_SAMPLES):
    """All self-maps of {0..m-1} for m <= 3, plus ``samples`` random ones for m = 4."""
    maps = [phi for m in (1, 2, 3) for phi in itertools.product(range(m), repeat=m)]
    rng = np.random.default_rng(seed)
    maps += [tuple(int(v) for v in rng.integers(0, 4, size=4)) for _ in range(samples)]
    return maps


def criterion_composition(seed: int = 0, samples: int = COMPOSITION_SAMPLES) -> CheckReport:
    """Multiplicativity, Markov property and lambda^k in the spectrum for composition operators."""
    rep = CheckReport("c5_composition")
    maps = composition_maps(seed, samples)
    for phi in maps:
        _fold(rep, markov_power_mechanism(CompositionOperator(phi)), f"phi = {phi}")
    rep.certificates.update(maps=len(maps), seed=seed)
    return rep


def criterion_semigroup() -> CheckReport:
    """Full transformation monoid on 3 points plus pinned edge cases."""
    rep = CheckReport("c6_semigroup")
    # 3-cycle, transposition, and the map collapsing point 1 onto point 0
    T3 = transformation_semigroup([(1, 2, 0), (1, 0, 2), (0, 0, 2)])
    oracle_all = list(itertools.product(range(3), repeat=3))
    oracle_idem = [f for f in oracle_all if all(f[f[i]] == f[i] for i in range(3))]
    if T3.size != 27 or sorted(T3.elements) != oracle_all:
        rep.fail(f"T3 has {T3.size} elements, expected 27")
    E = idempotents(T3)
    if len(E) != 10 or sorted(T3.elements[e] for e in E) != oracle_idem:
        rep.fail(f"T3 has {len(E)} idempotents, expected 10")
    if idempotents_by_powers(T3) != E:
        rep.fail("idempotents from power cycles differ from the table diagonal")
    for name, sub in (("T3", rees_checks(T3)), ("T3", minidem_correspondence(T3))):
        _fold(rep, sub, name)

    LZ = from_cayley([[0, 0], [1, 1]])
    left, right = minimal_ideals(LZ)
    if (idempotents(LZ) != [0, 1] or [I.members for I in left] != [frozenset({0, 1})]
            or [I.members for I in right] != [frozenset({0}), frozenset({1})] or center(LZ)):
        rep.fail("left-zero semigroup does not match its pinned structure")
    _fold(rep, rees_checks(LZ), "left-zero")

    Z5 = from_cayley([[(a + b) % 5 for b in range(5)] for a in range(5)])
    left, right = minimal_ideals(Z5)
    full = frozenset(range(5))
    if (idempotents(Z5) != [0] or [I.members for I in left] != [full]
            or [I.members for I in right] != [full] or center(Z5) != list(range(5))):
        rep.fail("cyclic group does not match its pinned structure")
    _fold(rep, rees_checks(Z5), "Z5")
    rep.certificates.update(T3_size=T3.size, T3_idempotents=len(E))
    return rep


def criterion_ip(seed: int = 0, count: int = IP_ROUND_TRIPS) -> CheckReport:
    """Finite-sums round trips, exact return sets and length-4 witnesses."""
    rep = CheckReport("c7_ip")
    rng = np.random.default_rng(seed)
    trips = 0
    while trips < count:
        m = int(rng.integers(1, 6))
        seq = np.sort(rng.choice(np.arange(1, 401), size=m, replace=False))
        fs = finite_sums(seq)
        if max(fs) > 2000:
            continue
        w = find_fs_sequence(fs, m, max(fs))
        if w is None or not w.fs_set <= fs:
            rep.fail(f"round trip failed for {seq.tolist()}")
        trips += 1
    names = []
    for f in fx.rational_rotation_battery():
        D = decompose(f.T, minimal_idempotent_spectral(f.T))
        _fold(rep, verify_ip_recurrence(f.T, D, epsilon=1e-6, N=1000, m=4), f.spec.name)
        names.append(f.spec.name)
    rep.certificates.update(round_trips=trips, rotation_fixtures=len(names), seed=seed)
    return rep


CRITERIA = {
    "c1_idempotent_cross_oracle": criterion_idempotent_cross_oracle,
    "c2_decomposition": criterion_decomposition,
    "c3_positive": criterion_positive,
    "c4_cyclicity": criterion_cyclicity,
    "c5_composition": criterion_composition,
    "c6_semigroup": lambda seed=0: criterion_semigroup(),
    "c7_ip": criterion_ip,
}


def run_battery(seed: int = 0, count: int | None = None) -> list[CheckReport]:
    """All criteria for one seed.  ``count`` scales every fixture count down (for quick runs)."""
    out = []
    for name, fn in sorted(CRITERIA.items()):
        if count is not None and name in ("c1_idempotent_cross_oracle", "c2_decomposition",
                                          "c3_positive", "c4_cyclicity"):
            out.append(fn(seed, count))
        else:
            out.append(fn(seed))
    return out
