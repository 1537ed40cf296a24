import logging

import numpy as np

from errors import InputValidationError
from models.clustering import ClusterAssignment, Dendrogram, Linkage, Merge

logger = logging.getLogger(__name__)


def hierarchical(D, linkage='single'):
    """
    Agglomerative (bottom-up) clustering on a distance matrix.

    Every step merges the two active clusters with the smallest linkage
    dissimilarity: the minimum member distance for single linkage, the maximum
    for complete. Cluster distances are updated in place on the n x n matrix,
    so each step costs O(n^2) and the whole run O(n^3).
    """
    linkage = Linkage.parse(linkage)
    n = D.n
    if n < 2:
        raise InputValidationError("hierarchical clustering needs at least 2 points")

    combine = np.minimum if linkage is Linkage.SINGLE else np.maximum
    dist = D.values.copy()
    np.fill_diagonal(dist, np.inf)

    active = np.ones(n, dtype=bool)
    slot_node = list(range(n))
    slot_size = [1] * n
    merges = []

    for step in range(n - 1):
        masked = np.where(active[:, None] & active[None, :], dist, np.inf)
        flat = int(np.argmin(masked))
        a, b = divmod(flat, n)
        if a > b:
            a, b = b, a
        height = float(dist[a, b])

        size = slot_size[a] + slot_size[b]
        merges.append(Merge(left=slot_node[a], right=slot_node[b], height=height, size=size))
        logger.debug(f"merge {step}: nodes {slot_node[a]} + {slot_node[b]} at {height:.6g}")

        # Merged cluster lives on in slot a; slot b retires
        merged = combine(dist[a], dist[b])
        dist[a, :] = merged
        dist[:, a] = merged
        dist[a, a] = np.inf
        active[b] = False
        slot_node[a] = n + step
        slot_size[a] = size

    logger.info(f"{linkage.value}-linkage dendrogram over {n} points, "
                f"top height {merges[-1].height:.6g}")
    return Dendrogram(merges=tuple(merges), linkage=linkage, metric=D.metric)


def cut_dendrogram(dendrogram, k):
    """Undo the last k-1 merges and label the remaining k clusters"""
    n = dendrogram.n
    if not 1 <= int(k) <= n:
        raise InputValidationError(f"k must be in [1, {n}], got {k}")

    parent = list(range(2 * n - 1))

    def find(node):
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for i, merge in enumerate(dendrogram.merges[:n - int(k)]):
        node = n + i
        parent[find(merge.left)] = node
        parent[find(merge.right)] = node

    roots = [find(leaf) for leaf in range(n)]
    parameters = {
        'linkage': dendrogram.linkage.value,
        'metric': dendrogram.metric.value,
        'k': int(k),
    }
    return ClusterAssignment.from_labels(roots, 'hierarchical', parameters)
