"""Independent GLOSH reference.

Computes outlier scores straight from the definition: lower a density
threshold through the distinct mutual-reachability levels, split clusters
divisively via connected components of the thresholded complete graph
(no MST, no union-find, no dendrogram), track the level at which each
point falls out of its cluster and the maximum level inside that
cluster's subtree, then score(x) = 1 - lam(x)/lam_max.

Pure-Python loops over sets; only suitable for small n.
"""

from __future__ import annotations

import math
from itertools import combinations


def core_distances_ref(points, min_samples: int = 1):
    n = len(points)
    out = []
    for i in range(n):
        ds = sorted(math.dist(points[i], points[j]) for j in range(n) if j != i)
        out.append(ds[min_samples - 1])
    return out


def mutual_reachability_ref(points, core):
    n = len(points)
    return [
        [
            0.0 if i == j else max(core[i], core[j], math.dist(points[i], points[j]))
            for j in range(n)
        ]
        for i in range(n)
    ]


def glosh_reference(points, min_samples: int = 1, min_cluster_size: int = 2):
    """GLOSH score per point, in input order."""
    n = len(points)
    core = core_distances_ref(points, min_samples)
    mrd = mutual_reachability_ref(points, core)

    leave = [0.0] * n        # density level at which the point leaves its cluster
    owner = [0] * n          # id of the cluster it fell out of
    children: dict[int, list[int]] = {}
    next_id = [0]

    def components(members, w):
        # connected components using only edges strictly below w
        unseen = set(members)
        parts = []
        while unseen:
            first = unseen.pop()
            comp = {first}
            stack = [first]
            while stack:
                u = stack.pop()
                for v in list(unseen):
                    if mrd[u][v] < w:
                        unseen.remove(v)
                        comp.add(v)
                        stack.append(v)
            parts.append(sorted(comp))
        return parts

    def process(members, cid):
        children[cid] = []
        levels = sorted({mrd[a][b] for a, b in combinations(members, 2)}, reverse=True)
        cur = list(members)
        for w in levels:
            lam = math.inf if w <= 0.0 else 1.0 / w
            parts = components(cur, w)
            if len(parts) == 1:
                continue
            big = [p for p in parts if len(p) >= min_cluster_size]
            for p in parts:
                if len(p) < min_cluster_size:
                    for x in p:
                        leave[x] = lam
                        owner[x] = cid
            if len(big) >= 2:
                for p in big:
                    next_id[0] += 1
                    children[cid].append(next_id[0])
                    process(p, next_id[0])
                return
            if len(big) == 1:
                cur = big[0]
            else:
                return
        # whatever is left is mutually coincident and never separates
        for x in cur:
            leave[x] = math.inf
            owner[x] = cid

    process(list(range(n)), 0)

    subtree_max: dict[int, float] = {}

    def tree_max(cid):
        own = [leave[x] for x in range(n) if owner[x] == cid]
        subs = [tree_max(c) for c in children.get(cid, [])]
        m = max(own + subs) if (own or subs) else 0.0
        subtree_max[cid] = m
        return m

    tree_max(0)

    scores = []
    for x in range(n):
        lam_x = leave[x]
        lam_top = subtree_max[owner[x]]
        scores.append(0.0 if lam_x == lam_top else 1.0 - lam_x / lam_top)
    return scores
