"""Integer linear algebra: Smith form, Z-basis tests, exact inverses."""

import numpy as np

from torichk import lattice


def _verify_decomposition(A):
    D, S, T, Tinv = lattice.smith_normal_form(A)
    A = np.array(A, dtype=object)
    D_, S_, T_, Tinv_ = (np.array(M, dtype=object) for M in (D, S, T, Tinv))
    assert np.array_equal(S_ @ A @ T_, D_)
    assert np.array_equal(T_ @ Tinv_, np.eye(T_.shape[0], dtype=object))
    # diagonal, nonnegative, divisibility chain
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j] == 0
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d != 0]
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    assert abs(round(lattice.determinant(S))) == 1
    assert abs(round(lattice.determinant(T))) == 1
    return diag


def test_smith_identity():
    assert _verify_decomposition([[1, 0], [0, 1]]) == [1, 1]


def test_smith_index_two_pair():
    # the designed-to-fail normals: sublattice of index 2
    diag = _verify_decomposition([[1, 1], [1, -1]])
    assert diag == [1, 2]


def test_smith_rectangular():
    assert _verify_decomposition([[2, 4, 4]]) == [2]
    assert _verify_decomposition([[1], [2], [3]]) == [1]


def test_smith_zero_matrix():
    assert _verify_decomposition([[0, 0], [0, 0]]) == [0, 0]


def test_smith_classic_example():
    diag = _verify_decomposition([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    assert diag == [2, 2, 156]


def test_smith_random_matrices():
    rng = np.random.default_rng(20260815)
    for _ in range(60):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(1, 5))
        A = rng.integers(-9, 10, (rows, cols)).tolist()
        _verify_decomposition(A)


def test_invariant_factors_and_rank():
    assert lattice.invariant_factors([[1, 1], [1, -1]]) == [1, 2]
    assert lattice.integer_rank([[1, 0], [0, 1], [1, 1]]) == 2
    assert lattice.integer_rank([[2, 4], [1, 2]]) == 1
    assert lattice.integer_rank([[0, 0]]) == 0


def test_extends_to_zbasis():
    assert lattice.extends_to_zbasis([[1, 0]])
    assert lattice.extends_to_zbasis([[1, 1]])
    assert lattice.extends_to_zbasis([[1, 0], [0, 1]])
    assert lattice.extends_to_zbasis([[1, 0], [1, 1]])
    assert not lattice.extends_to_zbasis([[2, 0]])
    assert not lattice.extends_to_zbasis([[1, 1], [1, -1]])
    assert not lattice.extends_to_zbasis([[1, 0], [0, 1], [1, 1]])


def test_zbasis_completion_makes_unimodular():
    rng = np.random.default_rng(7)
    cases = [[[1, 0]], [[1, 1]], [[3, 2]], [[1, 2, 3]], [[1, 0, 0], [0, 1, 1]]]
    for rows in cases:
        comp = lattice.zbasis_completion([list(r) for r in rows])
        M = [list(r) for r in rows] + comp
        assert len(M) == len(rows[0])
        assert abs(round(lattice.determinant(M))) == 1
    for _ in range(30):
        v = rng.integers(-6, 7, 3)
        g = int(np.gcd.reduce(np.abs(v)))
        if g == 0:
            continue
        v = (v // g).tolist()
        comp = lattice.zbasis_completion([v])
        assert abs(round(lattice.determinant([v] + comp))) == 1


def test_unimodular_inverse_exact():
    M = [[1, 0], [1, 1]]
    inv = lattice.unimodular_inverse(M)
    assert inv == [[1, 0], [-1, 1]]
    rng = np.random.default_rng(3)
    for _ in range(20):
        # random product of integer shears is unimodular by construction
        M = np.eye(3, dtype=int)
        for _ in range(6):
            S = np.eye(3, dtype=int)
            i, j = rng.choice(3, 2, replace=False)
            S[i, j] = int(rng.integers(-3, 4))
            M = M @ S
        inv = np.array(lattice.unimodular_inverse(M.tolist()))
        assert np.array_equal(M @ inv, np.eye(3, dtype=int))


def test_determinant_exact():
    assert lattice.determinant([[2, 0], [0, 3]]) == 6
    assert lattice.determinant([[1, 1], [1, -1]]) == -2
    rng = np.random.default_rng(5)
    for _ in range(25):
        A = rng.integers(-5, 6, (4, 4))
        want = int(round(float(np.linalg.det(A.astype(float)))))
        assert lattice.determinant(A.tolist()) == want
