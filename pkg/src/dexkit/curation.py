"""Demonstration curation: embeddings, HDBSCAN, GLOSH, percentile filtering.

Each demonstration is reduced to one feature vector per camera stream, the
two sets are clustered independently with a from-scratch HDBSCAN (mutual
reachability + MST + condensed hierarchy), every demo gets a GLOSH outlier
score per camera, and the final outlier score is the mean of the two.
Filtering keeps the demos at or below a chosen score percentile.

The in-repo featurizer is deliberately simple (grid color statistics) so
the pipeline runs without an ML runtime; externally computed embeddings can
be supplied through the ``features_<camera>.csv`` adapter instead.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import NoImages, TooFewPoints, UndecodableImage
from .recorder import Episode

GRID = 4                 # featurizer cells per image side
FEATURE_DIM = GRID * GRID * 3 * 2
DEFAULT_MIN_SAMPLES = 1
DEFAULT_MIN_CLUSTER_SIZE = 2
REPORT_NAME = "curation_report.json"
REPORT_PERCENTILES = (90, 70, 50)


# -- featurization ------------------------------------------------------------

def baseline_featurize(image_path) -> np.ndarray:
    """Grid color statistics of a PNG: 4x4 cells x RGB x (mean, std).

    Returns a (96,) vector with every component in [0, 1].  Cell order is
    row-major, channels RGB, mean before std.
    """
    try:
        with Image.open(image_path) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=float) / 255.0
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise UndecodableImage(f"{image_path}: {exc}") from exc
    features = []
    for rows in np.array_split(rgb, GRID, axis=0):
        for cell in np.array_split(rows, GRID, axis=1):
            flat = cell.reshape(-1, 3)
            for channel in range(3):
                features.append(float(flat[:, channel].mean()))
                features.append(float(flat[:, channel].std()))
    return np.array(features, dtype=float)


@dataclass(frozen=True)
class DemoEmbedding:
    """One demonstration's feature vector for a single camera stream."""

    demo_id: str
    camera: str
    vector: tuple[float, ...]


def embed_demo(episode: Episode, camera: str, featurizer=baseline_featurize) -> DemoEmbedding:
    """Average per-frame image features into one vector for the episode."""
    if camera == "top":
        refs = [f.image_top for f in episode.frames]
    elif camera == "wrist":
        refs = [f.image_wrist for f in episode.frames]
    else:
        raise ValueError(f"unknown camera {camera!r}")
    refs = [r for r in refs if r]
    if not refs:
        raise NoImages(f"episode {episode.episode_id} has no {camera} images")
    cache: dict[str, np.ndarray] = {}
    total = np.zeros(FEATURE_DIM)
    for ref in refs:
        if ref not in cache:
            cache[ref] = baseline_vector_check(featurizer(episode.directory / ref))
        total += cache[ref]
    mean = total / len(refs)
    return DemoEmbedding(demo_id=episode.episode_id, camera=camera,
                         vector=tuple(float(v) for v in mean))


def baseline_vector_check(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1 or not np.all(np.isfinite(vec)):
        raise UndecodableImage(f"featurizer produced invalid vector shape {vec.shape}")
    return vec


# -- HDBSCAN core -------------------------------------------------------------

def core_distances(points, min_samples: int = DEFAULT_MIN_SAMPLES) -> np.ndarray:
    """Distance from each point to its min_samples-th nearest neighbor."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = len(points)
    if n < min_samples + 1:
        raise TooFewPoints(f"need at least {min_samples + 1} points, got {n}")
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    d_sorted = np.sort(d, axis=1)
    return d_sorted[:, min_samples]  # column 0 is the self distance


def mutual_reachability(points, core: np.ndarray) -> np.ndarray:
    """mrd(a, b) = max(core(a), core(b), d(a, b)); zero diagonal."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    core = np.asarray(core, dtype=float)
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    mrd = np.maximum(d, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mrd, 0.0)
    return mrd


def build_mst(mrd: np.ndarray) -> list[tuple[float, int, int]]:
    """Kruskal MST over the complete mutual-reachability graph.

    Edges are returned sorted by (weight, i, j); the same ordering breaks
    ties during construction, so the result is deterministic.
    """
    n = len(mrd)
    if n < 2:
        raise TooFewPoints(f"need at least 2 points, got {n}")
    edges = sorted(
        (float(mrd[i][j]), i, j) for i in range(n) for j in range(i + 1, n)
    )
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = []
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append((w, i, j))
            if len(tree) == n - 1:
                break
    return tree


@dataclass(frozen=True)
class CondensedNode:
    """One row of the condensed hierarchy.

    ``child`` is a cluster id (>= n) or a point index (< n); ``lam`` is the
    density level 1/distance at which the child split off or fell out.
    """

    parent: int
    child: int
    lam: float
    size: int


def _single_linkage(mst_edges, n: int):
    """Merge MST edges ascending into a binary dendrogram.

    Returns (children, height) keyed by binary node id; leaves are 0..n-1,
    internal nodes n..2n-2 in merge order.
    """
    parent = list(range(2 * n - 1))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    children: dict[int, tuple[int, int]] = {}
    height: dict[int, float] = {}
    node = n
    for w, i, j in sorted(mst_edges):
        ri, rj = find(i), find(j)
        children[node] = (ri, rj)
        height[node] = w
        parent[ri] = parent[rj] = node
        node += 1
    return children, height


def _leaves(node: int, children, n: int) -> list[int]:
    stack, out = [node], []
    while stack:
        cur = stack.pop()
        if cur < n:
            out.append(cur)
        else:
            stack.extend(children[cur])
    return sorted(out)


def _lam(distance: float) -> float:
    return math.inf if distance <= 0.0 else 1.0 / distance


def condense_and_score(mst_edges, min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE):
    """Condense the single-linkage hierarchy and score every point.

    Removing MST edges in decreasing weight order splits the point set; a
    side smaller than ``min_cluster_size`` falls out of its cluster at that
    density level, otherwise it becomes (or continues) a cluster.  Returns
    ``(labels, scores, tree)``: flat cluster labels via excess-of-mass
    selection with noise as -1, GLOSH outlier scores in [0, 1], and the
    condensed tree rows.
    """
    n = len(mst_edges) + 1
    children, height = _single_linkage(mst_edges, n)
    root_binary = 2 * n - 2
    root_cluster = n  # cluster ids start at n, mirroring scipy conventions

    tree: list[CondensedNode] = []
    next_cluster = root_cluster + 1
    birth: dict[int, float] = {root_cluster: 0.0}
    # stack entries: (binary node, cluster id it currently belongs to)
    stack = [(root_binary, root_cluster)]
    while stack:
        node, cluster = stack.pop()
        if node < n:
            # singleton component at the top level never happens (MST is
            # connected); guard kept for clarity.
            tree.append(CondensedNode(cluster, node, math.inf, 1))
            continue
        lam = _lam(height[node])
        left, right = children[node]
        sides = []
        for side in (left, right):
            size = 1 if side < n else len(_leaves(side, children, n))
            sides.append((side, size))
        big = [s for s in sides if s[1] >= min_cluster_size]
        if len(big) == 2:
            for side, size in sides:
                cid = next_cluster
                next_cluster += 1
                birth[cid] = lam
                tree.append(CondensedNode(cluster, cid, lam, size))
                stack.append((side, cid))
        elif len(big) == 1:
            small = sides[0] if sides[1][0] == big[0][0] else sides[1]
            for point in _leaves(small[0], children, n):
                tree.append(CondensedNode(cluster, point, lam, 1))
            stack.append((big[0][0], cluster))
        else:
            for side, _ in sides:
                for point in _leaves(side, children, n):
                    tree.append(CondensedNode(cluster, point, lam, 1))

    scores = _glosh_scores(tree, birth, n)
    labels = _eom_labels(tree, birth, n, root_cluster)
    return labels, scores, tuple(tree)


def _glosh_scores(tree, birth, n: int) -> np.ndarray:
    """GLOSH(x) = 1 - lambda(x) / lambda_max over x's cluster subtree."""
    point_lam = np.zeros(n)
    point_cluster = np.zeros(n, dtype=int)
    cluster_children: dict[int, list[int]] = {}
    lam_max: dict[int, float] = {c: 0.0 for c in birth}
    for row in tree:
        if row.child < n:
            point_lam[row.child] = row.lam
            point_cluster[row.child] = row.parent
            lam_max[row.parent] = max(lam_max[row.parent], row.lam)
        else:
            cluster_children.setdefault(row.parent, []).append(row.child)
    # propagate subtree maxima up: children have higher ids than parents
    for cid in sorted(birth, reverse=True):
        for child in cluster_children.get(cid, ()):
            lam_max[cid] = max(lam_max[cid], lam_max[child])
    scores = np.zeros(n)
    for p in range(n):
        lam_p = float(point_lam[p])
        lam_top = lam_max[int(point_cluster[p])]
        scores[p] = 0.0 if lam_p == lam_top else 1.0 - lam_p / lam_top
    return scores


def _eom_labels(tree, birth, n: int, root_cluster: int) -> np.ndarray:
    """Flat labels by excess-of-mass cluster selection; noise is -1."""
    stability: dict[int, float] = {c: 0.0 for c in birth}
    cluster_children: dict[int, list[int]] = {}
    for row in tree:
        b = birth[row.parent]
        contribution = 0.0 if row.lam == b else (row.lam - b) * row.size
        if math.isfinite(contribution):
            stability[row.parent] += contribution
        elif row.lam == math.inf and math.isfinite(b):
            stability[row.parent] = math.inf
        if row.child >= n:
            cluster_children.setdefault(row.parent, []).append(row.child)

    selected: set[int] = set()
    subtree_score: dict[int, float] = {}
    for cid in sorted(birth, reverse=True):
        child_sum = sum(subtree_score[c] for c in cluster_children.get(cid, ()))
        if cid == root_cluster:
            subtree_score[cid] = child_sum
            continue
        if stability[cid] >= child_sum:
            selected.add(cid)
            for child in cluster_children.get(cid, ()):
                _deselect_subtree(child, cluster_children, selected)
            subtree_score[cid] = stability[cid]
        else:
            subtree_score[cid] = child_sum

    # map each point to the selected cluster on its ancestor path, if any
    parent_of: dict[int, int] = {}
    point_cluster = {}
    for row in tree:
        if row.child >= n:
            parent_of[row.child] = row.parent
        else:
            point_cluster[row.child] = row.parent
    label_of_cluster = {cid: k for k, cid in enumerate(sorted(selected))}
    labels = np.full(n, -1, dtype=int)
    for p in range(n):
        cur = point_cluster[p]
        while cur is not None:
            if cur in selected:
                labels[p] = label_of_cluster[cur]
                break
            cur = parent_of.get(cur)
    return labels


def _deselect_subtree(cid: int, cluster_children, selected: set) -> None:
    stack = [cid]
    while stack:
        cur = stack.pop()
        selected.discard(cur)
        stack.extend(cluster_children.get(cur, ()))


def cluster_points(points, min_samples: int = DEFAULT_MIN_SAMPLES,
                   min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE):
    """Full HDBSCAN+GLOSH pass over raw points: (labels, scores, tree)."""
    core = core_distances(points, min_samples)
    mrd = mutual_reachability(points, core)
    mst = build_mst(mrd)
    return condense_and_score(mst, min_cluster_size)


# -- dataset scoring ----------------------------------------------------------

@dataclass(frozen=True)
class DemoScore:
    demo_id: str
    score_top: float
    score_wrist: float
    outlier_score: float
    label_top: int
    label_wrist: int


@dataclass(frozen=True)
class CurationReport:
    """Per-demo outlier scores plus percentile retention sets."""

    demos: tuple[DemoScore, ...]
    ranking: tuple[str, ...]          # demo ids, highest outlier score first
    percentiles: dict[int, tuple[str, ...]]

    def to_dict(self) -> dict:
        return {
            "demos": [
                {
                    "id": d.demo_id,
                    "score_top": d.score_top,
                    "score_wrist": d.score_wrist,
                    "outlier_score": d.outlier_score,
                    "label_top": d.label_top,
                    "label_wrist": d.label_wrist,
                }
                for d in self.demos
            ],
            "ranking": list(self.ranking),
            "percentiles": {f"p{p}": list(ids) for p, ids in sorted(self.percentiles.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_dict(cls, d: dict) -> "CurationReport":
        demos = tuple(
            DemoScore(
                demo_id=str(rec["id"]),
                score_top=float(rec["score_top"]),
                score_wrist=float(rec["score_wrist"]),
                outlier_score=float(rec["outlier_score"]),
                label_top=int(rec["label_top"]),
                label_wrist=int(rec["label_wrist"]),
            )
            for rec in d["demos"]
        )
        percentiles = {
            int(key[1:]): tuple(str(i) for i in ids)
            for key, ids in d["percentiles"].items()
        }
        return cls(demos=demos, ranking=tuple(str(i) for i in d["ranking"]),
                   percentiles=percentiles)

    @classmethod
    def load(cls, path) -> "CurationReport":
        return cls.from_dict(json.loads(Path(path).read_text()))


def score_embeddings(embeddings: list[DemoEmbedding],
                     min_samples: int = DEFAULT_MIN_SAMPLES,
                     min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE):
    """Cluster one camera's embedding set; returns (labels, scores) by demo order."""
    points = np.array([e.vector for e in embeddings], dtype=float)
    labels, scores, _ = cluster_points(points, min_samples, min_cluster_size)
    return labels, scores


def build_report(top: list[DemoEmbedding], wrist: list[DemoEmbedding],
                 min_samples: int = DEFAULT_MIN_SAMPLES,
                 min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE) -> CurationReport:
    """Fuse per-camera GLOSH scores into the final report."""
    if len(top) != len(wrist) or [e.demo_id for e in top] != [e.demo_id for e in wrist]:
        raise ValueError("top and wrist embeddings must cover the same demos in order")
    if len(top) < 3:
        raise TooFewPoints(f"need at least 3 demos, got {len(top)}")
    ids = [e.demo_id for e in top]
    labels_t, scores_t = score_embeddings(top, min_samples, min_cluster_size)
    labels_w, scores_w = score_embeddings(wrist, min_samples, min_cluster_size)
    demos = tuple(
        DemoScore(
            demo_id=ids[i],
            score_top=float(scores_t[i]),
            score_wrist=float(scores_w[i]),
            outlier_score=(float(scores_t[i]) + float(scores_w[i])) / 2.0,
            label_top=int(labels_t[i]),
            label_wrist=int(labels_w[i]),
        )
        for i in range(len(ids))
    )
    ranking = tuple(
        d.demo_id for d in sorted(demos, key=lambda d: (-d.outlier_score, d.demo_id))
    )
    percentiles = {}
    report = CurationReport(demos=demos, ranking=ranking, percentiles=percentiles)
    for p in REPORT_PERCENTILES:
        retained, _ = filter_percentile(report, p)
        percentiles[p] = tuple(retained)
    return report


def score_dataset(dataset_root, featurizer=baseline_featurize,
                  min_samples: int = DEFAULT_MIN_SAMPLES,
                  min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE,
                  features_top=None, features_wrist=None) -> CurationReport:
    """Score every demo in a dataset directory and return the report.

    Embeddings come from the in-repo featurizer unless ``features_top`` /
    ``features_wrist`` point at externally computed CSV tables.
    """
    from .recorder import load_episode

    root = Path(dataset_root)
    manifest = load_manifest(root)
    episodes = [load_episode(root / name) for name in manifest]
    by_camera = {}
    for camera, table_path in (("top", features_top), ("wrist", features_wrist)):
        if table_path is not None:
            table = load_feature_table(table_path)
            vectors = []
            for ep in episodes:
                if ep.episode_id not in table:
                    raise NoImages(f"{table_path} lacks features for {ep.episode_id}")
                vectors.append(DemoEmbedding(ep.episode_id, camera, table[ep.episode_id]))
            by_camera[camera] = vectors
        else:
            by_camera[camera] = [embed_demo(ep, camera, featurizer) for ep in episodes]
    return build_report(by_camera["top"], by_camera["wrist"],
                        min_samples, min_cluster_size)


def filter_percentile(report: CurationReport, p: float):
    """Drop demos whose outlier score is strictly above the percentile value.

    Nearest-rank percentile: with scores ascending, the percentile value is
    the score at 1-based index ceil(n * p / 100).  Returns (retained ids,
    removed ids), each sorted by demo id.
    """
    if not (0 < p < 100):
        raise ValueError(f"percentile must be in (0, 100), got {p}")
    scores = sorted(d.outlier_score for d in report.demos)
    n = len(scores)
    rank = max(1, math.ceil(n * p / 100))
    value = scores[rank - 1]
    retained = sorted(d.demo_id for d in report.demos if d.outlier_score <= value)
    removed = sorted(d.demo_id for d in report.demos if d.outlier_score > value)
    return retained, removed


# -- external feature tables --------------------------------------------------

def load_feature_table(path) -> dict[str, tuple[float, ...]]:
    """Read ``features_<camera>.csv``: one row per demo, id then d floats."""
    table: dict[str, tuple[float, ...]] = {}
    dim = None
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            demo_id, values = row[0], tuple(float(v) for v in row[1:])
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise ValueError(f"{path}: row {demo_id!r} has {len(values)} values, expected {dim}")
            table[demo_id] = values
    return table


def load_manifest(dataset_root) -> list[str]:
    path = Path(dataset_root) / "manifest.json"
    data = json.loads(path.read_text())
    return [str(name) for name in data["episodes"]]


def save_manifest(dataset_root, episode_dirs) -> None:
    path = Path(dataset_root) / "manifest.json"
    path.write_text(json.dumps({"episodes": list(episode_dirs)}, indent=2) + "\n")
