import numpy as np
import pytest

from conftest import matrix_of
from errors import InputValidationError
from models.clustering import NOISE, DbscanConfig
from services.dbscan import dbscan
from services.metric_space import distance_matrix


def reachability_oracle(values, eps, min_pts):
    """Full label vector by brute force: core components, then border points, then noise"""
    n = values.shape[0]
    core = {i for i in range(n) if sum(values[i, j] <= eps for j in range(n)) >= min_pts}

    components = []
    unvisited = set(core)
    while unvisited:
        start = min(unvisited)
        component, frontier = {start}, [start]
        while frontier:
            point = frontier.pop()
            for other in core:
                if other not in component and values[point, other] <= eps:
                    component.add(other)
                    frontier.append(other)
        unvisited -= component
        components.append(component)

    labels = [NOISE] * n
    for number, component in enumerate(components):
        for point in component:
            labels[point] = number
    for point in set(range(n)) - core:
        reaching = [number for number, component in enumerate(components)
                    if any(values[point, c] <= eps for c in component)]
        if reaching:
            labels[point] = min(reaching)
    return labels


def triads_and_outlier():
    left = [[0, 0], [1, 0], [0, 1]]
    right = [[100, 0], [101, 0], [100, 1]]
    return matrix_of(left + right + [[50, 0]])


class TestDbscan:

    def test_two_triads_and_an_outlier(self):
        D = distance_matrix(triads_and_outlier(), 'euclidean')
        assignment = dbscan(D, DbscanConfig(eps=2, min_pts=3))
        assert assignment.k == 2
        assert assignment.noise_indices.tolist() == [6]
        assert assignment.groups() == [[0, 1, 2], [3, 4, 5]]

    def test_large_eps_single_cluster(self, rng):
        D = distance_matrix(matrix_of(rng.normal(size=(10, 2))), 'euclidean')
        assignment = dbscan(D, DbscanConfig(eps=float(D.values.max()) + 1, min_pts=1))
        assert assignment.k == 1
        assert not assignment.has_noise

    def test_tiny_eps_all_noise(self, rng):
        D = distance_matrix(matrix_of(rng.normal(size=(10, 2))), 'euclidean')
        smallest = D.values[D.values > 0].min()
        assignment = dbscan(D, DbscanConfig(eps=smallest / 2, min_pts=2))
        assert assignment.k == 0
        assert assignment.noise_indices.size == 10

    def test_border_point_goes_to_lowest_cluster(self):
        # 2.5 is not core but lies within eps of core points 1.5 and 3.5
        X = matrix_of([0, 0.5, 1.0, 1.5, 2.5, 3.5, 4.0, 4.5, 5.0])
        D = distance_matrix(X, 'euclidean')
        assignment = dbscan(D, DbscanConfig(eps=1.0, min_pts=4))
        assert assignment.labels.tolist() == [0, 0, 0, 0, 0, 1, 1, 1, 1]

    def test_parameters_recorded(self):
        D = distance_matrix(triads_and_outlier(), 'euclidean')
        assignment = dbscan(D, DbscanConfig(eps=2, min_pts=3))
        assert assignment.algorithm == 'dbscan'
        assert assignment.parameters == {'eps': 2, 'min_pts': 3, 'metric': 'euclidean'}

    def test_matches_reachability_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            n = int(rng.integers(2, 61))
            D = distance_matrix(matrix_of(rng.uniform(0, 10, size=(n, 2))), 'euclidean')
            eps = float(rng.uniform(0.5, 3.0))
            min_pts = int(rng.integers(1, 6))
            assignment = dbscan(D, DbscanConfig(eps=eps, min_pts=min_pts))

            expected = reachability_oracle(D.values, eps, min_pts)
            assert assignment.labels.tolist() == expected
            assert set(assignment.noise_indices.tolist()) == {i for i, label in enumerate(expected)
                                                               if label == NOISE}

    def test_row_permutation_keeps_noise_set(self, rng):
        values = rng.uniform(0, 10, size=(30, 2))
        order = rng.permutation(30)
        config = DbscanConfig(eps=1.5, min_pts=3)
        original = dbscan(distance_matrix(matrix_of(values), 'euclidean'), config)
        permuted = dbscan(distance_matrix(matrix_of(values[order]), 'euclidean'), config)
        assert set(order[permuted.noise_indices].tolist()) == set(original.noise_indices.tolist())


class TestDbscanConfig:

    def test_eps_must_be_positive(self):
        with pytest.raises(InputValidationError, match='eps'):
            DbscanConfig(eps=0, min_pts=2)

    def test_min_pts_at_least_one(self):
        with pytest.raises(InputValidationError, match='min_pts'):
            DbscanConfig(eps=1, min_pts=0)

    def test_noise_only_for_dbscan(self):
        from models.clustering import ClusterAssignment
        with pytest.raises(InputValidationError, match='only valid for dbscan'):
            ClusterAssignment([0, NOISE], 'kmeans')
