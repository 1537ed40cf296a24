import numpy as np
import pytest

from conftest import matrix_of
from errors import InputValidationError, NumericError
from models.clustering import ClusterAssignment, KMeansConfig, NOISE
from models.validation import GapResult, KSelection, SswCurve
from services.kmeans import kmeans
from services.metric_space import distance_matrix
from services.validation import (
    exclude_noise, gap_statistic, hierarchical_clusterer, kmeans_clusterer, noise_as_group,
    pooled_within_dispersion, select_k_elbow, select_k_gap, select_k_silhouette, silhouette,
    ssw, ssw_curve, ssw_for_assignment, within_dispersion,
)


def naive_silhouette(D, labels):
    n = len(labels)
    clusters = sorted(set(labels))
    widths = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            widths.append(0.0)
            continue
        a = sum(D[i][j] for j in own) / len(own)
        b = min(
            sum(D[i][j] for j in range(n) if labels[j] == c) / sum(1 for j in range(n) if labels[j] == c)
            for c in clusters if c != labels[i]
        )
        widths.append((b - a) / max(a, b) if max(a, b) > 0 else 0.0)
    per_cluster = [np.mean([widths[i] for i in range(n) if labels[i] == c]) for c in clusters]
    return widths, float(np.mean(per_cluster))


def naive_dispersion(D, labels):
    total = 0.0
    for c in set(labels):
        members = [i for i in range(len(labels)) if labels[i] == c]
        total += sum(D[i][j] ** 2 for i in members for j in members) / (2 * len(members))
    return total


def random_assignment(rng, n, k):
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(labels)
    return ClusterAssignment.from_labels(labels, 'kmeans')


class TestSilhouette:

    def test_two_far_pairs(self):
        D = distance_matrix(matrix_of([[0, 0], [0, 1], [100, 0], [100, 1]]), 'euclidean')
        result = silhouette(D, ClusterAssignment([0, 0, 1, 1], 'kmeans'))
        b = (100 + np.sqrt(100 ** 2 + 1)) / 2
        expected = (b - 1) / b
        assert result.per_point == pytest.approx([expected] * 4, abs=1e-12)
        assert result.overall == pytest.approx(expected, abs=1e-12)

    def test_singleton_scores_zero(self):
        D = distance_matrix(matrix_of([0, 1, 10]), 'euclidean')
        result = silhouette(D, ClusterAssignment([0, 0, 1], 'kmeans'))
        assert result.per_point[2] == 0.0

    def test_collapsed_clusters_score_one(self):
        D = distance_matrix(matrix_of([[1, 1], [1, 1], [4, 5], [4, 5]]), 'euclidean')
        assert silhouette(D, ClusterAssignment([0, 0, 1, 1], 'kmeans')).overall == 1.0

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(4, 15))
            k = int(rng.integers(2, min(n, 5) + 1))
            D = distance_matrix(matrix_of(rng.normal(size=(n, 2))), 'euclidean')
            assignment = random_assignment(rng, n, k)
            result = silhouette(D, assignment)
            widths, overall = naive_silhouette(D.values, assignment.labels.tolist())
            assert np.allclose(result.per_point, widths, atol=1e-12, rtol=0)
            assert result.overall == pytest.approx(overall, abs=1e-12)
            assert np.all(np.abs(result.per_point) <= 1.0)
            assert result.overall == pytest.approx(float(np.mean(result.per_cluster)), abs=1e-15)

    def test_literal_orientation_flips_sign(self, rng):
        D = distance_matrix(matrix_of(rng.normal(size=(12, 2))), 'euclidean')
        assignment = random_assignment(rng, 12, 3)
        standard = silhouette(D, assignment)
        literal = silhouette(D, assignment, orientation='literal')
        assert np.allclose(literal.per_point, -standard.per_point, atol=1e-15)

    def test_needs_two_clusters(self):
        D = distance_matrix(matrix_of([0, 1, 2]), 'euclidean')
        with pytest.raises(NumericError, match='at least 2 clusters'):
            silhouette(D, ClusterAssignment([0, 0, 0], 'kmeans'))

    def test_noise_must_be_removed_first(self):
        D = distance_matrix(matrix_of([0, 1, 2, 3]), 'euclidean')
        with pytest.raises(InputValidationError, match='NOISE'):
            silhouette(D, ClusterAssignment([0, 0, 1, NOISE], 'dbscan'))


class TestNoiseHandling:

    def test_exclude_noise(self):
        D = distance_matrix(matrix_of([0, 1, 2, 50]), 'euclidean')
        subset, clean = exclude_noise(D, ClusterAssignment([0, 0, NOISE, 1], 'dbscan'))
        assert subset.row_ids == ('r0', 'r1', 'r3')
        assert clean.labels.tolist() == [0, 0, 1]

    def test_noise_as_group(self):
        labels = noise_as_group(ClusterAssignment([0, NOISE, 0, NOISE], 'dbscan'))
        assert labels.tolist() == [0, 1, 0, 1]


class TestDispersion:

    def test_all_singletons(self):
        D = distance_matrix(matrix_of([0, 3, 7]), 'euclidean')
        assert pooled_within_dispersion(D, ClusterAssignment([0, 1, 2], 'kmeans')) == 0.0

    def test_one_pair(self):
        D = distance_matrix(matrix_of([0, 2]), 'euclidean')
        assert pooled_within_dispersion(D, ClusterAssignment([0, 0], 'kmeans')) == 2.0

    def test_matches_naive_and_coordinate_forms(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(3, 12))
            X = matrix_of(rng.normal(size=(n, 3)))
            D = distance_matrix(X, 'euclidean')
            assignment = random_assignment(rng, n, int(rng.integers(1, n + 1)))
            pooled = pooled_within_dispersion(D, assignment)
            assert pooled == pytest.approx(naive_dispersion(D.values, assignment.labels.tolist()), abs=1e-12)
            assert within_dispersion(X.values, assignment.labels) == pytest.approx(pooled, abs=1e-9)


class TestSsw:

    def test_k_equals_n(self, rng):
        X = matrix_of(rng.normal(size=(5, 2)))
        assert ssw(X, kmeans(X, KMeansConfig(k=5, restarts=2))) == pytest.approx(0.0, abs=1e-12)

    def test_equals_objective_for_euclidean(self, rng):
        X = matrix_of(rng.normal(size=(30, 2)))
        result = kmeans(X, KMeansConfig(k=3, restarts=5))
        assert ssw(X, result) == pytest.approx(result.objective, abs=1e-12)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(3, 12))
            values = rng.normal(size=(n, 2))
            assignment = random_assignment(rng, n, int(rng.integers(1, n + 1)))
            expected = 0.0
            for i in range(n):
                members = values[assignment.labels == assignment.labels[i]]
                expected += float(np.sum((values[i] - members.mean(axis=0)) ** 2))
            assert ssw_for_assignment(matrix_of(values), assignment) == pytest.approx(expected, abs=1e-12)

    def test_noise_points_left_out(self):
        X = matrix_of([0, 2, 100])
        assert ssw_for_assignment(X, ClusterAssignment([0, 0, NOISE], 'dbscan')) == 2.0

    def test_curve_non_increasing(self, three_blobs):
        X, _ = three_blobs
        curve = ssw_curve(X, range(1, 6), KMeansConfig(k=1, restarts=25))
        assert curve.is_non_increasing()
        assert curve.k_values == (1, 2, 3, 4, 5)


class TestGapStatistic:

    def test_reference_equal_to_data_gives_zero_gap(self, rng):
        X = matrix_of(rng.normal(size=(20, 2)))
        result = gap_statistic(X, [1, 2, 3], b_copies=1, seed=0,
                               clusterer=kmeans_clusterer(restarts=3),
                               reference_sampler=lambda data, generator: data.values)
        assert np.allclose(result.gap, 0.0, atol=1e-12)
        assert np.all(result.s == 0.0)

    def test_single_copy_has_zero_spread(self, rng):
        X = matrix_of(rng.normal(size=(20, 2)))
        result = gap_statistic(X, [1, 2], 1, 0, kmeans_clusterer(restarts=2))
        assert result.s.tolist() == [0.0, 0.0]

    def test_deterministic(self, rng):
        X = matrix_of(rng.normal(size=(25, 2)))
        first = gap_statistic(X, [1, 2, 3], 5, 42, kmeans_clusterer(restarts=2))
        second = gap_statistic(X, [1, 2, 3], 5, 42, kmeans_clusterer(restarts=2))
        assert first.to_dict() == second.to_dict()

    def test_degenerate_column(self):
        X = matrix_of([[1, 5], [2, 5], [3, 5]])
        with pytest.raises(NumericError, match='degenerate column range: c1'):
            gap_statistic(X, [1, 2], 2, 0, kmeans_clusterer())

    def test_k_out_of_range(self):
        X = matrix_of([[1, 2], [2, 1], [3, 5]])
        with pytest.raises(InputValidationError):
            gap_statistic(X, [1, 4], 2, 0, kmeans_clusterer())

    def test_hierarchical_clusterer(self, three_blobs):
        X, _ = three_blobs
        result = gap_statistic(X, [1, 2, 3, 4, 5], 5, 1, hierarchical_clusterer('euclidean', 'single'))
        assert result.k_values == (1, 2, 3, 4, 5)
        assert result.gap[2] > result.gap[1] > result.gap[0]

    def test_recovers_three_blobs(self):
        from services.synthesizer import synthesize
        hits = 0
        for seed in range(10):
            X, _ = synthesize(seed=seed, n=150, planted_k=3, separation=8.0, sd=1.0)
            result = gap_statistic(X, range(1, 6), 50, seed, kmeans_clusterer(restarts=5, seed=seed))
            hits += select_k_gap(result).k == 3
        assert hits >= 9


def gap_result(gap, s, k_values=None):
    k_values = k_values or list(range(1, len(gap) + 1))
    zeros = [0.0] * len(gap)
    return GapResult(k_values=k_values, gap=gap, s=s, log_w_observed=zeros,
                     log_w_reference=zeros, b_copies=1, seed=0)


class TestSelectionRules:

    def test_silhouette_kmeans_series(self):
        assert select_k_silhouette({2: 0.97, 3: 0.89, 4: 0.84, 5: 0.72}) == KSelection('silhouette', 4)

    def test_silhouette_hierarchical_series(self):
        assert select_k_silhouette({2: 0.97, 3: 0.94, 4: 0.86, 5: 0.85}).k == 3

    def test_silhouette_flat_series_picks_smallest(self):
        assert select_k_silhouette({2: 0.5, 3: 0.5, 4: 0.5}).k == 2

    def test_silhouette_needs_two_values(self):
        with pytest.raises(InputValidationError):
            select_k_silhouette({2: 0.5})

    def test_silhouette_needs_consecutive_k(self):
        with pytest.raises(InputValidationError, match='consecutive'):
            select_k_silhouette({2: 0.5, 4: 0.4})

    def test_gap_kmeans_series(self):
        result = gap_result([0.717, 0.748, 0.765, 0.769], [0.01, 0.01, 0.01, 0.01], [2, 3, 4, 5])
        selection = select_k_gap(result)
        assert selection.k == 4
        assert not selection.fallback

    def test_gap_first_k_qualifies(self):
        assert select_k_gap(gap_result([1.0, 0.5], [0.0, 0.0])).k == 1

    def test_gap_no_k_qualifies(self):
        selection = select_k_gap(gap_result([0.1, 0.2, 0.3], [0.0, 0.0, 0.0]))
        assert selection == KSelection('gap', 3, fallback=True)

    def test_elbow_hand_computed(self):
        assert select_k_elbow(SswCurve(k_values=(1, 2, 3, 4), ssw=[100, 20, 15, 12])).k == 2

    def test_elbow_linear_curve_picks_smallest_interior(self):
        assert select_k_elbow(SswCurve(k_values=(1, 2, 3, 4, 5), ssw=[50, 40, 30, 20, 10])).k == 2

    def test_elbow_needs_three_points(self):
        with pytest.raises(InputValidationError):
            select_k_elbow(SswCurve(k_values=(1, 2), ssw=[5, 1]))

    def test_elbow_on_three_blobs(self, three_blobs):
        X, _ = three_blobs
        curve = ssw_curve(X, range(1, 6), KMeansConfig(k=1, restarts=10))
        assert select_k_elbow(curve).k == 3
