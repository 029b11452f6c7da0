import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koehler.errors import IllConditionedSplitError, InvalidInputError
from koehler.linalg import (
    OperatorMatrix,
    eigen_decompose,
    hessenberg,
    invariant_split,
    is_power_bounded,
    load_matrix,
    matrix_from_dict,
    matrix_to_dict,
    null_space,
    principal_angles,
    reorder_schur,
    schur,
    solve_triangular_sylvester,
    spectrum,
)

seeds = st.integers(0, 2**32 - 1)


def _random(n, seed, cplx=True):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    if cplx:
        A = A + 1j * rng.normal(size=(n, n))
    return A


def _match_multisets(a, b):
    """Greedy nearest matching distance between two eigenvalue lists."""
    b = list(b)
    worst = 0.0
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(j)))
    return worst


# ---------------------------------------------------------------- inputs


def test_rejects_non_square():
    with pytest.raises(InvalidInputError):
        OperatorMatrix(np.zeros((2, 3)))


def test_rejects_nan():
    with pytest.raises(InvalidInputError):
        OperatorMatrix(np.array([[1.0, np.nan], [0, 1]]))


def test_rejects_large_dim_and_bad_tol():
    with pytest.raises(InvalidInputError):
        OperatorMatrix(np.eye(257))
    with pytest.raises(InvalidInputError):
        OperatorMatrix(np.eye(2), tol=0.1)


def test_json_round_trip(tmp_path):
    A = _random(4, 1)
    d = matrix_to_dict(A)
    assert np.array_equal(matrix_from_dict(d).entries, A)
    p = tmp_path / "m.json"
    p.write_text(json.dumps(d))
    assert np.array_equal(load_matrix(p).entries, A)


def test_csv_and_bare_list(tmp_path):
    (tmp_path / "m.csv").write_text("1,2\n3,4\n")
    (tmp_path / "m.json").write_text("[[1, 2], [3, 4]]")
    a = load_matrix(tmp_path / "m.csv").entries
    b = load_matrix(tmp_path / "m.json").entries
    assert np.array_equal(a, b) and a[1, 0] == 3


def test_dim_mismatch_rejected():
    with pytest.raises(InvalidInputError):
        matrix_from_dict({"dim": 3, "entries": [[1, 0], [0, 1]]})


# ------------------------------------------------------------ Schur form


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), seed=seeds, cplx=st.booleans())
def test_schur_is_unitary_triangularisation(n, seed, cplx):
    A = _random(n, seed, cplx)
    R, Z = schur(A)
    assert np.allclose(np.tril(R, -1), 0)
    assert np.linalg.norm(Z.conj().T @ Z - np.eye(n)) < 1e-12 * n
    assert np.linalg.norm(Z @ R @ Z.conj().T - A) < 1e-12 * n * np.linalg.norm(A)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), seed=seeds)
def test_eigenvalues_match_lapack(n, seed):
    A = _random(n, seed)
    ours = np.diag(schur(A)[0])
    assert _match_multisets(ours, np.linalg.eigvals(A)) < 1e-9 * max(1, np.linalg.norm(A))


def test_hessenberg_form():
    A = _random(7, 3)
    H, Q = hessenberg(A)
    assert np.allclose(np.tril(H, -2), 0)
    assert np.allclose(Q @ H @ Q.conj().T, A)


def test_reorder_moves_selection_to_front():
    A = np.diag([0.1, 1.0, 0.2, -1.0]) + np.triu(_random(4, 5).real, 1)
    R, Z = schur(A)
    R2, Z2, k = reorder_schur(R, Z, lambda z: abs(z) > 0.5)
    assert k == 2
    assert np.all(np.abs(np.diag(R2)[:2]) > 0.5) and np.all(np.abs(np.diag(R2)[2:]) < 0.5)
    assert np.allclose(Z2 @ R2 @ Z2.conj().T, A)


def test_triangular_sylvester():
    rng = np.random.default_rng(2)
    R11 = np.triu(rng.normal(size=(3, 3))) + 3 * np.eye(3)
    R22 = np.triu(rng.normal(size=(2, 2))) - 3 * np.eye(2)
    C = rng.normal(size=(3, 2))
    Y = solve_triangular_sylvester(R11, R22, C)
    assert np.allclose(R11 @ Y - Y @ R22, C)


# -------------------------------------------------------- spectral data


def test_multiplicities_and_radius():
    s = spectrum(np.diag([1.0, 1.0, 0.5, -1.0]))
    mult = {round(e.value.real, 6): e.algebraic_multiplicity for e in s.eigenvalues}
    assert mult == {1.0: 2, -1.0: 1, 0.5: 1}
    assert s.spectral_radius == pytest.approx(1.0)
    assert s.dim == 4


def test_jordan_block_not_semisimple():
    eig = eigen_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))
    (e,) = eig.spectrum.eigenvalues
    assert e.algebraic_multiplicity == 2 and e.peripheral_semisimple is False
    assert eig.eigenvectors[0].shape[1] == 1


def test_null_space_dimension():
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    N = null_space(A, 1e-9)
    assert N.shape == (2, 1) and np.allclose(A @ N, 0)


@pytest.mark.parametrize("A, expected", [
    (np.eye(3), True),
    (np.array([[0, -1], [1, 0]]), True),
    (np.diag([1.0, 0.5]), True),
    (np.array([[1.0, 1.0], [0.0, 1.0]]), False),
    (np.diag([1.01, 0.2]), False),
    (np.array([[0.5, 100.0], [0.0, 0.5]]), True),
])
def test_power_boundedness(A, expected):
    pb = is_power_bounded(A)
    assert bool(pb) is expected


def test_power_bound_estimate_for_transient_growth():
    # ||T^n|| peaks well above 1 before decaying; the estimate sees the peak
    A = np.array([[0.5, 100.0], [0.0, 0.5]])
    pb = is_power_bounded(A)
    brute = max(np.linalg.norm(np.linalg.matrix_power(A, n)) for n in range(1, 50))
    assert pb.bound_estimate == pytest.approx(brute, rel=1e-12)


# ------------------------------------------------------- invariant split


def _eig_projector(A, mask_fn):
    """Spectral projector via eigenvectors (diagonalizable A only)."""
    w, V = np.linalg.eig(A)
    D = np.diag([1.0 if mask_fn(z) else 0.0 for z in w])
    return V @ D @ np.linalg.inv(V)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 10), seed=seeds)
def test_split_matches_eigenvector_projector(n, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n))
    vals = np.concatenate([np.exp(2j * np.pi * rng.random(k)), 0.8 * rng.random(n - k)])
    S = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if np.linalg.cond(S) > 1e3:
        return
    A = S @ np.diag(vals) @ np.linalg.inv(S)
    sel = lambda z: abs(z) > 0.95
    sp = invariant_split(A, sel)
    assert sp.selected.dim == k
    assert np.linalg.norm(sp.projector - _eig_projector(A, sel)) < 1e-8 * np.linalg.cond(S) ** 2


def test_split_refuses_touching_groups():
    A = np.diag([1.0, 1.0 - 1e-9])
    with pytest.raises(IllConditionedSplitError):
        invariant_split(A, lambda z: z.real > 1 - 5e-10)


def test_principal_angles_of_equal_and_orthogonal_spaces():
    U = np.eye(4)[:, :2]
    assert np.allclose(principal_angles(U, U), 0)
    assert np.allclose(principal_angles(U, np.eye(4)[:, 2:]), np.pi / 2)
