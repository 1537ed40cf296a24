import logging
from collections import deque

import numpy as np

from models.clustering import ClusterAssignment, NOISE

logger = logging.getLogger(__name__)


def dbscan(D, config):
    """
    Density-based clustering on a precomputed distance matrix.

    A point is core when at least min_pts points (itself included) lie within
    eps. Clusters are the connected components of core points under
    eps-adjacency, numbered by their lowest core index. A non-core point within
    eps of some core point joins the lowest-numbered such cluster; everything
    else is NOISE.
    """
    neighbors = D.values <= config.eps
    core = neighbors.sum(axis=1) >= config.min_pts
    n = D.n

    labels = np.full(n, NOISE, dtype=np.int64)
    cluster = 0
    for seed in np.flatnonzero(core):
        if labels[seed] != NOISE:
            continue
        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            point = queue.popleft()
            for other in np.flatnonzero(neighbors[point] & core):
                if labels[other] == NOISE:
                    labels[other] = cluster
                    queue.append(other)
        cluster += 1

    for point in np.flatnonzero(~core):
        reachable = labels[neighbors[point] & core]
        if reachable.size:
            labels[point] = int(reachable.min())

    noise_count = int(np.sum(labels == NOISE))
    logger.info(f"DBSCAN eps={config.eps:g} min_pts={config.min_pts}: "
                f"{cluster} cluster(s), {noise_count} noise point(s)")

    return ClusterAssignment(labels, 'dbscan', config.to_dict())
