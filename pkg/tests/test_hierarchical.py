import numpy as np
import pytest

from conftest import matrix_of
from errors import InputValidationError
from models.clustering import Dendrogram, Linkage, Merge
from services.hierarchical import cut_dendrogram, hierarchical
from services.metric_space import distance_matrix


def mst_weights(values):
    """Prim's algorithm over a dense distance matrix; returns sorted edge weights"""
    n = values.shape[0]
    in_tree = [0]
    best = values[0].copy()
    weights = []
    for _ in range(n - 1):
        candidates = [j for j in range(n) if j not in in_tree]
        nxt = min(candidates, key=lambda j: best[j])
        weights.append(best[nxt])
        in_tree.append(nxt)
        best = np.minimum(best, values[nxt])
    return sorted(weights)


@pytest.fixture
def line_points():
    return distance_matrix(matrix_of([0, 1, 10]), 'manhattan')


class TestHierarchical:

    def test_single_linkage_on_a_line(self, line_points):
        tree = hierarchical(line_points, 'single')
        assert tree.heights() == [1.0, 9.0]
        assert {tree.merges[0].left, tree.merges[0].right} == {0, 1}
        assert tree.merges[1].size == 3

    def test_complete_linkage_on_a_line(self, line_points):
        tree = hierarchical(line_points, Linkage.COMPLETE)
        assert tree.heights() == [1.0, 10.0]

    def test_two_points(self):
        tree = hierarchical(distance_matrix(matrix_of([[0, 0], [3, 4]]), 'euclidean'))
        assert len(tree.merges) == 1
        assert tree.heights() == [5.0]

    def test_leaf_order(self, line_points):
        assert hierarchical(line_points).leaf_order() == [0, 1, 2]

    def test_single_linkage_heights_are_mst_weights(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(2, 41))
            D = distance_matrix(matrix_of(rng.normal(size=(n, 2))), 'euclidean')
            assert hierarchical(D, 'single').heights() == mst_weights(D.values)

    @pytest.mark.parametrize('linkage', ['single', 'complete'])
    def test_heights_non_decreasing(self, linkage, rng):
        D = distance_matrix(matrix_of(rng.normal(size=(25, 3))), 'manhattan')
        heights = hierarchical(D, linkage).heights()
        assert all(a <= b for a, b in zip(heights, heights[1:]))

    def test_unknown_linkage(self, line_points):
        with pytest.raises(InputValidationError, match='unknown linkage'):
            hierarchical(line_points, 'ward')


class TestCutDendrogram:

    def test_two_clusters_on_a_line(self, line_points):
        assignment = cut_dendrogram(hierarchical(line_points), 2)
        assert assignment.groups() == [[0, 1], [2]]
        assert assignment.parameters['k'] == 2

    def test_one_and_n(self, rng):
        D = distance_matrix(matrix_of(rng.normal(size=(8, 2))), 'euclidean')
        tree = hierarchical(D)
        assert set(cut_dendrogram(tree, 1).labels.tolist()) == {0}
        assert sorted(cut_dendrogram(tree, 8).labels.tolist()) == list(range(8))

    def test_k_out_of_range(self, line_points):
        with pytest.raises(InputValidationError):
            cut_dendrogram(hierarchical(line_points), 4)

    @pytest.mark.parametrize('linkage', ['single', 'complete'])
    def test_finer_cut_refines_coarser(self, linkage, rng):
        D = distance_matrix(matrix_of(rng.normal(size=(20, 2))), 'euclidean')
        tree = hierarchical(D, linkage)
        for k in range(2, 21):
            coarse = cut_dendrogram(tree, k - 1).labels
            fine = cut_dendrogram(tree, k).labels
            for cluster in range(k):
                assert len(set(coarse[fine == cluster].tolist())) == 1


class TestDendrogram:

    def test_rejects_reused_node(self):
        with pytest.raises(InputValidationError, match='unavailable node'):
            Dendrogram(merges=(Merge(0, 1, 1.0, 2), Merge(0, 2, 2.0, 2)),
                       linkage='single', metric='euclidean')

    def test_rejects_decreasing_heights(self):
        with pytest.raises(InputValidationError, match='decrease'):
            Dendrogram(merges=(Merge(0, 1, 2.0, 2), Merge(3, 2, 1.0, 3)),
                       linkage='single', metric='euclidean')

    def test_dict_round_trip(self, line_points):
        tree = hierarchical(line_points)
        assert Dendrogram.from_dict(tree.to_dict()) == tree
