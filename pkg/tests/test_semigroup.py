import itertools
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koehler.errors import CapExceededError, CollapseError, InvalidInputError, UnsupportedInputError
from koehler.semigroup import (
    boolean_matrix_semigroup,
    center,
    compose,
    find_nonassociative,
    from_cayley,
    from_dict,
    idempotent_order,
    idempotents,
    idempotents_by_powers,
    kernel,
    leq,
    load,
    matrix_semigroup,
    minidem_correspondence,
    minimal_idempotents,
    minimal_ideals,
    principal_ideals,
    rees_checks,
    transformation_semigroup,
)

PINS = json.loads((Path(__file__).parent / "data" / "semigroups.json").read_text())

CYCLE3, SWAP3, COLLAPSE3 = (1, 2, 0), (1, 0, 2), (0, 0, 2)


def _closure_oracle(gens):
    """Plain set closure under composition, independent of the table builder."""
    S = set(gens)
    while True:
        new = {compose(a, b) for a in S for b in S} - S
        if not new:
            return S
        S |= new


def _idx(S, f):
    return S.elements.index(tuple(f))


def _members(S, ideals):
    return [sorted(S.elements[i] for i in I.members) for I in ideals]


# ---------------------------------------------------------------- T2


@pytest.fixture
def T2():
    return transformation_semigroup([(1, 0), (0, 0)])


def test_T2_has_four_elements(T2):
    assert T2.size == 4
    assert sorted(T2.elements) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_T2_order(T2):
    c1, c2, ident = _idx(T2, (0, 0)), _idx(T2, (1, 1)), _idx(T2, (0, 1))
    assert leq(T2, c1, ident) and leq(T2, c2, ident)
    assert not leq(T2, c1, c2) and not leq(T2, c2, c1)
    assert sorted(idempotents(T2)) == sorted([c1, c2, ident])


def test_T2_ideals_match_brute_force(T2):
    left, right = minimal_ideals(T2)
    pin = PINS["T2"]
    assert _members(T2, left) == [sorted(map(tuple, s)) for s in pin["minimal_left"]]
    assert sorted(_members(T2, right)) == sorted(sorted(map(tuple, s)) for s in pin["minimal_right"])


def test_T2_constants_share_kernel_not_image(T2):
    rep = minidem_correspondence(T2)
    assert rep.passed
    assert rep.certificates["kernels"] == 1 and rep.certificates["images"] == 2


def test_T2_rees_and_center(T2):
    c1 = _idx(T2, (0, 0))
    assert rees_checks(T2).passed
    assert T2.set_product(T2.right_multiples(c1), [c1]) == {c1}
    assert [T2.elements[i] for i in center(T2)] == [tuple(f) for f in PINS["T2"]["center"]]


# ---------------------------------------------------------------- T3


@pytest.fixture(scope="module")
def T3():
    return transformation_semigroup([CYCLE3, SWAP3, COLLAPSE3])


def test_T3_size_and_idempotents(T3):
    assert sorted(T3.elements) == [tuple(f) for f in PINS["T3"]["elements"]]
    E = idempotents(T3)
    assert sorted(T3.elements[e] for e in E) == [tuple(f) for f in PINS["T3"]["idempotents"]]
    assert len(E) == 10


def test_T3_structure(T3):
    assert rees_checks(T3).passed
    rep = minidem_correspondence(T3)
    assert rep.passed
    # the three constants: one kernel, three images
    assert rep.certificates["minimal_idempotents"] == 3
    assert sorted(T3.elements[i] for i in kernel(T3)) == [(0, 0, 0), (1, 1, 1), (2, 2, 2)]
    assert [T3.elements[i] for i in center(T3)] == [(0, 1, 2)]


def test_constant_generator_does_not_reach_T3():
    # a constant composed with anything is a constant, so only S3 plus constants appear
    S = transformation_semigroup([CYCLE3, SWAP3, (0, 0, 0)])
    assert S.size == 9


def test_labels_are_shortlex(T3):
    words = T3.words
    assert words[:3] == [(0,), (1,), (2,)]
    assert all((len(a), a) < (len(b), b) for a, b in zip(words, words[1:]))


# ----------------------------------------------------------- edge cases


def test_left_zero_semigroup():
    S = from_cayley([[0, 0], [1, 1]])
    left, right = minimal_ideals(S)
    assert idempotents(S) == [0, 1]
    # S.a = {a, b} for both a, while a.S = {a}
    assert [I.members for I in left] == [frozenset({0, 1})]
    assert [I.members for I in right] == [frozenset({0}), frozenset({1})]
    assert center(S) == []
    rep = rees_checks(S)
    assert rep.passed and rep.certificates["group_orders"] == [1]


def test_group_edge_case():
    S = from_cayley([[(a + b) % 4 for b in range(4)] for a in range(4)])
    left, right = minimal_ideals(S)
    assert idempotents(S) == [0]
    assert idempotent_order(S) == [(0, 0)]
    assert [I.members for I in left] == [I.members for I in right] == [frozenset(range(4))]
    assert center(S) == [0, 1, 2, 3]
    assert rees_checks(S).certificates["group_orders"] == [4]


def test_semilattice_order_is_inclusion():
    subsets = [frozenset(s) for r in range(4) for s in itertools.combinations(range(3), r)]
    table = [[subsets.index(a & b) for b in subsets] for a in subsets]
    S = from_cayley(table)
    assert idempotents(S) == list(range(len(subsets)))
    assert sorted(idempotent_order(S)) == sorted(
        (i, j) for i, a in enumerate(subsets) for j, b in enumerate(subsets) if a <= b)


def test_nilpotent_boolean_chain():
    S = boolean_matrix_semigroup([np.eye(4, k=1)])
    assert S.size == 4  # g, g^2, g^3, 0
    assert len(idempotents(S)) == 1
    assert not S.elements[idempotents(S)[0]].any()


def test_rank_one_boolean_matrices():
    gens = [np.outer(u, v) for u in np.eye(3) for v in np.eye(3)]
    S = boolean_matrix_semigroup(gens)
    rep = minidem_correspondence(S)
    assert rep.passed, rep.violations()
    assert rep.certificates["minimal_left"] * rep.certificates["minimal_right"] \
        == rep.certificates["minimal_idempotents"]


def test_rotation_gives_cyclic_group():
    c, s = np.cos(2 * np.pi / 5), np.sin(2 * np.pi / 5)
    S = matrix_semigroup([[[c, -s], [s, c]]], epsilon=1e-9)
    assert S.size == 5
    assert center(S) == list(range(5))
    assert len(idempotents(S)) == 1
    assert minidem_correspondence(S).passed


def test_coarse_epsilon_collapses():
    c, s = np.cos(0.3), np.sin(0.3)
    with pytest.raises(CollapseError):
        matrix_semigroup([[[c, -s], [s, c]], [[1.0, 0.0], [0.0, 0.0]]], epsilon=0.35)


def test_cap_exceeded():
    with pytest.raises(CapExceededError):
        transformation_semigroup([CYCLE3, SWAP3, COLLAPSE3], cap=10)


def test_non_associative_table_rejected():
    with pytest.raises(InvalidInputError):
        from_cayley([[1, 0], [0, 0]])


def test_abstract_table_has_no_correspondence():
    with pytest.raises(UnsupportedInputError):
        minidem_correspondence(from_cayley([[0, 0], [1, 1]]))


def test_json_round_trip(tmp_path):
    S = transformation_semigroup([(1, 0), (0, 0)])
    p = tmp_path / "s.json"
    p.write_text(json.dumps(S.to_dict()))
    assert np.array_equal(load(p).cayley, S.cayley)
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"kind": "transformations", "generators": [[1, 0], [0, 0]]}))
    assert load(g).size == 4
    with pytest.raises(InvalidInputError):
        from_dict({"size": 3, "cayley": [[0]]})


def test_sampled_associativity_check_on_large_table():
    m = 600
    table = np.array([[(a + b) % m for b in range(m)] for a in range(m)])
    assert find_nonassociative(table) is None
    table[5, 7] = 0
    assert find_nonassociative(table, samples=2_000_000) is not None


# ------------------------------------------------------- property tests


maps = st.integers(2, 4).flatmap(
    lambda k: st.lists(st.tuples(*[st.integers(0, k - 1)] * k), min_size=1, max_size=3))


@settings(max_examples=60, deadline=None)
@given(gens=maps)
def test_random_transformation_semigroups(gens):
    S = transformation_semigroup(gens)
    assert set(S.elements) == _closure_oracle(gens)
    E = idempotents(S)
    assert E and idempotents_by_powers(S) == E
    # order is a partial order
    rel = set(idempotent_order(S))
    assert all((e, e) in rel for e in E)
    assert all(not ((a, b) in rel and (b, a) in rel) or a == b for a in E for b in E)
    assert all((a, c) in rel for (a, b) in rel for (b2, c) in rel if b == b2)
    # every minimal left ideal holds a minimal idempotent
    left, _ = minimal_ideals(S)
    M = set(minimal_idempotents(S))
    assert all(I.members & M for I in left)
    assert rees_checks(S).passed
    assert minidem_correspondence(S).passed
    # ideals really are ideals
    lefts, rights = principal_ideals(S)
    assert all(S.set_product(range(S.size), I.members) <= I.members for I in lefts)
    assert all(S.set_product(I.members, range(S.size)) <= I.members for I in rights)
    center(S)
