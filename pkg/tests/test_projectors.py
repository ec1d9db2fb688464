import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kacz.errors import DependentSubsetError
from kacz.projectors import (
    adjugate,
    apply_rejection,
    leave_one_out_angles,
    make_row_subset,
    orthogonal_projector,
    quasi_projector,
    recursive_projector,
    subset_geometry,
)

ATOL = 1e-10


def random_subset(seed, M=6, N=4, n=3, scale=1.0):
    """Subset of a Gaussian matrix: independent with probability one."""
    rng = np.random.default_rng(seed)
    A = scale * rng.standard_normal((M, N))
    idx = np.sort(rng.choice(M, size=n, replace=False))
    return make_row_subset(A, idx)


independent_subsets = st.builds(
    random_subset,
    seed=st.integers(0, 100_000),
    M=st.integers(4, 8),
    N=st.integers(4, 6),
    n=st.integers(1, 4),
)


class TestRowSubset:
    def test_rejects_unsorted(self, reference_A):
        with pytest.raises(ValueError, match="strictly increasing"):
            make_row_subset(reference_A, [1, 0])

    def test_rejects_duplicates(self, reference_A):
        with pytest.raises(ValueError, match="strictly increasing"):
            make_row_subset(reference_A, [1, 1])

    def test_rejects_out_of_range(self, reference_A):
        with pytest.raises(ValueError, match="out of range"):
            make_row_subset(reference_A, [0, 3])

    def test_rejects_oversize(self, reference_A):
        with pytest.raises(ValueError, match="subset size"):
            make_row_subset(reference_A, [0, 1, 2])

    def test_rows_match_parent(self, reference_A):
        S = make_row_subset(reference_A, [0, 2])
        assert np.array_equal(S.A_n, reference_A[[0, 2]])


class TestSubsetGeometry:
    def test_orthonormal_pair(self, reference_A):
        geom = subset_geometry(make_row_subset(reference_A, [0, 1]))
        assert np.allclose(geom.G_n, np.eye(2), atol=0)
        assert geom.v_sq == pytest.approx(1.0, abs=ATOL)
        assert geom.rank == 2

    def test_skew_pair_determinant_by_hand(self, reference_A):
        geom = subset_geometry(make_row_subset(reference_A, [1, 2]))
        assert np.allclose(geom.G_n, [[1.0, 1.0], [1.0, 2.0]], atol=ATOL)
        # det [[1,1],[1,2]] = 1
        assert geom.v_sq == pytest.approx(1.0, abs=ATOL)

    def test_duplicated_row_is_dependent(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 1.0]])
        geom = subset_geometry(make_row_subset(A, [0, 1]))
        assert geom.v_sq == 0.0
        assert geom.rank == 1

    @given(independent_subsets)
    def test_volume_matches_det_oracle(self, S):
        geom = subset_geometry(S)
        det = np.linalg.det(S.A_n @ S.A_n.T)
        assert geom.v_sq == pytest.approx(det, rel=1e-8, abs=1e-12)

    @given(independent_subsets)
    def test_hadamard_bound(self, S):
        geom = subset_geometry(S)
        bound = np.prod(np.sum(S.A_n**2, axis=1))
        assert geom.v_sq <= bound * (1 + 1e-10)


class TestOrthogonalProjector:
    def test_single_row_closed_form(self):
        S = make_row_subset(np.array([[1.0, 1.0]]).reshape(1, 2), [0])
        assert np.allclose(orthogonal_projector(S), [[0.5, 0.5], [0.5, 0.5]], atol=ATOL)

    def test_spanning_pair_gives_identity(self, reference_A):
        S = make_row_subset(reference_A, [1, 2])
        assert np.allclose(orthogonal_projector(S), np.eye(2), atol=ATOL)

    def test_dependent_raises(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 1.0]])
        with pytest.raises(DependentSubsetError):
            orthogonal_projector(make_row_subset(A, [0, 1]))

    @given(independent_subsets)
    def test_projector_laws(self, S):
        P = orthogonal_projector(S)
        assert np.max(np.abs(P @ P - P)) <= ATOL
        assert np.max(np.abs(P - P.T)) <= ATOL
        assert abs(np.trace(P) - S.n) <= ATOL
        # fixes its own span
        assert np.max(np.abs(P @ S.A_n.T - S.A_n.T)) <= ATOL * max(1.0, np.abs(S.A_n).max())


class TestAdjugate:
    def test_1x1_is_one(self):
        assert adjugate(np.array([[7.3]])).tolist() == [[1.0]]

    def test_2x2_by_hand(self):
        got = adjugate(np.array([[1.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(got, [[2.0, -1.0], [-1.0, 1.0]], atol=0)

    def test_singular_2x2(self):
        G = np.array([[1.0, 1.0], [1.0, 1.0]])
        adj = adjugate(G)
        assert np.allclose(adj, [[1.0, -1.0], [-1.0, 1.0]], atol=0)
        assert np.max(np.abs(G @ adj)) <= ATOL

    @given(st.integers(0, 100_000), st.integers(1, 6))
    def test_fundamental_identity(self, seed, n):
        B = np.random.default_rng(seed).standard_normal((n, n))
        G = B @ B.T
        det = np.linalg.det(G)
        residual = G @ adjugate(G) - det * np.eye(n)
        assert np.max(np.abs(residual)) <= 1e-8 * (1 + abs(det)) * max(1.0, np.abs(G).max() ** n)

    @given(st.integers(0, 100_000), st.integers(2, 6))
    def test_identity_on_singular(self, seed, n):
        rng = np.random.default_rng(seed)
        B = rng.standard_normal((n, n - 1))
        G = B @ B.T  # rank n-1 by construction
        adj = adjugate(G)
        assert np.max(np.abs(G @ adj)) <= 1e-8 * max(1.0, np.abs(G).max() ** n)
        assert np.max(np.abs(adj - adj.T)) <= ATOL * max(1.0, np.abs(adj).max())


class TestQuasiProjector:
    def test_reference_pair(self, reference_A):
        Q = quasi_projector(make_row_subset(reference_A, [1, 2]))
        assert np.allclose(Q, np.eye(2), atol=ATOL)

    def test_repeated_row_vanishes(self):
        A = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 1.0]])
        Q = quasi_projector(make_row_subset(A, [0, 1]))
        assert np.max(np.abs(Q)) <= ATOL

    def test_single_row_outer_product(self):
        a = np.array([3.0, -2.0])
        Q = quasi_projector(make_row_subset(a.reshape(1, 2), [0]))
        assert np.allclose(Q, np.outer(a, a), atol=0)

    @given(independent_subsets)
    def test_scaled_projector(self, S):
        geom = subset_geometry(S)
        Q = quasi_projector(S)
        P = orthogonal_projector(S)
        assert np.max(np.abs(Q - geom.v_sq * P)) <= 1e-8 * (1 + geom.v_sq)


class TestRecursiveProjector:
    def test_orthonormal_rows_in_r3(self):
        A = np.eye(3)
        S = make_row_subset(A, [0, 1])
        angles = leave_one_out_angles(S)
        assert angles == pytest.approx([1.0, 1.0], abs=ATOL)
        assert np.allclose(recursive_projector(S), np.diag([1.0, 1.0, 0.0]), atol=ATOL)

    def test_reference_pair(self, reference_A):
        S = make_row_subset(reference_A, [1, 2])
        assert np.allclose(recursive_projector(S), np.eye(2), atol=1e-9)

    def test_random_subsets_match_direct_form(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            A = rng.standard_normal((6, 4))
            idx = np.sort(rng.choice(6, size=3, replace=False))
            S = make_row_subset(A, idx)
            diff = recursive_projector(S) - orthogonal_projector(S)
            assert np.max(np.abs(diff)) <= 1e-10

    def test_dependent_raises(self):
        A = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        with pytest.raises(DependentSubsetError):
            recursive_projector(make_row_subset(A, [0, 1]))

    def test_needs_two_rows(self, reference_A):
        with pytest.raises(ValueError):
            recursive_projector(make_row_subset(reference_A, [0]))

    @given(independent_subsets)
    def test_facet_identity(self, S):
        """Squared volume = facet squared volume * squared height, per facet."""
        if S.n < 2:
            return
        geom = subset_geometry(S)
        angles = leave_one_out_angles(S)
        for s in range(S.n):
            rest = [i for i in range(S.n) if i != s]
            facet = np.linalg.det(S.A_n[rest] @ S.A_n[rest].T)
            norm_sq = float(S.A_n[s] @ S.A_n[s])
            assert geom.v_sq == pytest.approx(facet * norm_sq * angles[s], rel=1e-7, abs=1e-12)


class TestApplyRejection:
    def test_row_space_annihilated(self, reference_A):
        S = make_row_subset(reference_A, [0, 2])
        r = 0.3 * S.A_n[0] + 1.7 * S.A_n[1]
        assert np.max(np.abs(apply_rejection(S, r))) <= ATOL * np.linalg.norm(r)

    def test_orthogonal_complement_fixed(self):
        A = np.eye(3)
        S = make_row_subset(A, [0, 1])
        r = np.array([0.0, 0.0, 2.5])
        assert np.array_equal(apply_rejection(S, r), r)

    def test_coordinate_rejection(self):
        S = make_row_subset(np.array([[1.0, 0.0]]), [0])
        assert np.allclose(apply_rejection(S, [1.0, 1.0]), [0.0, 1.0], atol=0)

    def test_dependent_raises(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(DependentSubsetError):
            apply_rejection(make_row_subset(A, [0, 1]), np.ones(2))

    @given(independent_subsets)
    def test_contraction_and_orthogonality(self, S):
        rng = np.random.default_rng(0)
        r = rng.standard_normal(S.A_n.shape[1])
        out = apply_rejection(S, r)
        assert np.linalg.norm(out) <= np.linalg.norm(r) + ATOL
        assert np.max(np.abs(S.A_n @ out)) <= 1e-8 * max(1.0, np.linalg.norm(r)) * max(
            1.0, np.abs(S.A_n).max()
        )
