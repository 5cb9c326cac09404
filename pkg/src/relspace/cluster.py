"""Agglomerative clustering of 2-D coordinates with silhouette-based k selection.

The merge sequence is computed with Lance-Williams updates over Euclidean
distances.  Node ids follow the usual convention: leaves are 0..n-1 and the
t-th merge creates node n+t.  Equal-distance merges are broken
deterministically toward the smallest (i, j) pair of node ids, so the tree
is reproducible for any input order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

_LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class ClusterTree:
    """Dendrogram as an ordered merge list (n-1 merges over n leaves)."""

    leaves: tuple[str, ...]
    merges: tuple[Merge, ...]
    linkage: str

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)


@dataclass(frozen=True)
class KSelection:
    """Silhouette-selected cluster count; ties go to the smaller k."""

    k_best: int
    mean_silhouette_by_k: dict[int, float]


def _pairwise(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1))


def agglomerate(coords, names=None, linkage: str = "average") -> ClusterTree:
    """Hierarchical clustering over points; returns the full merge tree.

    Cluster-to-cluster distances are maintained with the Lance-Williams
    recurrence for the requested linkage (single = min, complete = max,
    average = UPGMA).  Duplicate points are allowed and produce zero-height
    merges.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2:
        raise ValueError("coords must be a 2-D array (n points x dims)")
    n = coords.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points to cluster")
    if not np.all(np.isfinite(coords)):
        raise ValueError("coords contain non-finite entries")
    if linkage not in _LINKAGES:
        raise ValueError(f"linkage must be one of {_LINKAGES}, got {linkage!r}")
    if names is None:
        names = tuple(f"p{i}" for i in range(n))
    else:
        names = tuple(names)
        if len(names) != n:
            raise ValueError("names length must match number of points")

    dist: dict[tuple[int, int], float] = {}
    D0 = _pairwise(coords)
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(D0[i, j])
    active: dict[int, int] = {i: 1 for i in range(n)}  # node id -> cluster size

    merges: list[Merge] = []
    for step in range(n - 1):
        best = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        (i, j), h = best
        new_id = n + step
        size = active[i] + active[j]
        ni, nj = active[i], active[j]
        del active[i], active[j]
        del dist[(i, j)]
        for k in list(active):
            dki = dist.pop((min(i, k), max(i, k)))
            dkj = dist.pop((min(j, k), max(j, k)))
            if linkage == "single":
                dnew = min(dki, dkj)
            elif linkage == "complete":
                dnew = max(dki, dkj)
            else:
                dnew = (ni * dki + nj * dkj) / (ni + nj)
            dist[(k, new_id)] = dnew
        active[new_id] = size
        merges.append(Merge(left=i, right=j, height=h, size=size))

    return ClusterTree(leaves=names, merges=tuple(merges), linkage=linkage)


def cut(tree: ClusterTree, k: int) -> dict[str, int]:
    """Partition leaves into k clusters by undoing the last k-1 merges.

    Cluster ids 0..k-1 are assigned in order of first leaf appearance.
    """
    n = tree.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    parent = list(range(n + len(tree.merges)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, m in enumerate(tree.merges[: n - k]):
        new_id = n + t
        parent[find(m.left)] = new_id
        parent[find(m.right)] = new_id

    roots: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for leaf_idx, name in enumerate(tree.leaves):
        root = find(leaf_idx)
        if root not in roots:
            roots[root] = len(roots)
        assignment[name] = roots[root]
    return assignment


def silhouette(coords, labels) -> tuple[np.ndarray, float]:
    """Per-point silhouette widths s(i) = (b-a)/max(a,b) and their mean.

    ``labels`` are integer cluster ids aligned with the rows of ``coords``.
    a(i) is the mean distance to the point's own cluster (self excluded);
    b(i) the smallest mean distance to another cluster.  Singleton-cluster
    points score 0.
    """
    coords = np.asarray(coords, dtype=np.float64)
    labels = np.asarray(labels)
    n = coords.shape[0]
    if labels.shape != (n,):
        raise ValueError("labels must align with coords rows")
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise ValueError("silhouette requires at least 2 clusters")
    D = _pairwise(coords)
    s = np.zeros(n)
    for i in range(n):
        own = labels == labels[i]
        n_own = own.sum()
        if n_own == 1:
            s[i] = 0.0
            continue
        a = D[i][own].sum() / (n_own - 1)
        b = min(D[i][labels == c].mean() for c in uniq if c != labels[i])
        denom = max(a, b)
        s[i] = 0.0 if denom == 0 else (b - a) / denom
    return s, float(s.mean())


def select_k(coords, tree: ClusterTree) -> KSelection:
    """Mean silhouette for every k in [2, n-1]; argmax with smaller-k ties."""
    n = tree.n_leaves
    if n < 3:
        raise ValueError("select_k requires at least 3 points")
    coords = np.asarray(coords, dtype=np.float64)
    by_k: dict[int, float] = {}
    for k in range(2, n):
        assignment = cut(tree, k)
        labels = np.array([assignment[name] for name in tree.leaves])
        _, mean = silhouette(coords, labels)
        by_k[k] = mean
    k_best = max(sorted(by_k), key=lambda k: (by_k[k], -k))
    return KSelection(k_best=k_best, mean_silhouette_by_k=by_k)


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def tree_to_json(tree: ClusterTree) -> dict:
    return {
        "leaves": list(tree.leaves),
        "linkage": tree.linkage,
        "merges": [
            {"left": m.left, "right": m.right, "height": m.height, "size": m.size}
            for m in tree.merges
        ],
    }


def write_tree_json(tree: ClusterTree, path, extra: dict | None = None) -> None:
    obj = tree_to_json(tree)
    if extra:
        obj.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def tree_to_dot(tree: ClusterTree) -> str:
    """Graphviz DOT rendering of the merge tree (children point to parents)."""
    n = tree.n_leaves
    lines = ["digraph dendrogram {", "  rankdir=BT;", "  node [shape=box];"]
    for i, name in enumerate(tree.leaves):
        lines.append(f'  n{i} [label="{name}"];')
    for t, m in enumerate(tree.merges):
        nid = n + t
        lines.append(f'  n{nid} [label="h={m.height:.4g}", shape=ellipse];')
        lines.append(f"  n{m.left} -> n{nid};")
        lines.append(f"  n{m.right} -> n{nid};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_text(tree: ClusterTree) -> str:
    """Plain-text indented rendering, root first."""
    n = tree.n_leaves

    def render(node: int, depth: int, out: list[str]) -> None:
        pad = "  " * depth
        if node < n:
            out.append(f"{pad}{tree.leaves[node]}")
        else:
            m = tree.merges[node - n]
            out.append(f"{pad}+ h={m.height:.6g} size={m.size}")
            render(m.left, depth + 1, out)
            render(m.right, depth + 1, out)

    out: list[str] = []
    render(n + len(tree.merges) - 1, 0, out)
    return "\n".join(out) + "\n"


_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


def tree_to_svg(tree: ClusterTree, k: int | None = None,
                width: int = 640, height: int = 420) -> str:
    """Standalone SVG dendrogram; branches colored by cluster when k is given.

    Links whose height lies above the k-cluster cut are drawn in gray.  The
    output embeds no timestamps, so identical trees render byte-identically.
    """
    n = tree.n_leaves
    # leaf order: left-to-right in-order walk of the final tree
    order: list[int] = []

    def walk(node: int) -> None:
        if node < n:
            order.append(node)
        else:
            m = tree.merges[node - n]
            walk(m.left)
            walk(m.right)

    walk(n + len(tree.merges) - 1)
    xpos = {leaf: i for i, leaf in enumerate(order)}

    colors = {}
    if k is not None:
        assignment = cut(tree, k)
        for i, name in enumerate(tree.leaves):
            colors[i] = _PALETTE[assignment[name] % len(_PALETTE)]

    max_h = max((m.height for m in tree.merges), default=1.0) or 1.0
    margin_l, margin_r, margin_t, margin_b = 40, 10, 10, 110
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    step = plot_w / max(n - 1, 1)

    def sx(pos: float) -> float:
        return margin_l + pos * step

    def sy(h: float) -> float:
        return margin_t + plot_h * (1.0 - h / max_h)

    node_x: dict[int, float] = {i: float(xpos[i]) for i in range(n)}
    node_h: dict[int, float] = {i: 0.0 for i in range(n)}
    node_color: dict[int, str] = dict(colors)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for t, m in enumerate(tree.merges):
        nid = n + t
        xl, xr = node_x[m.left], node_x[m.right]
        hl, hr = node_h[m.left], node_h[m.right]
        node_x[nid] = (xl + xr) / 2.0
        node_h[nid] = m.height
        cl = node_color.get(m.left, "#333333")
        cr = node_color.get(m.right, "#333333")
        same = cl == cr
        node_color[nid] = cl if same else "#999999"
        bar = node_color[nid] if same else "#999999"
        parts.append(
            f'<path d="M {sx(xl):.2f} {sy(hl):.2f} V {sy(m.height):.2f} '
            f'H {sx(xr):.2f} V {sy(hr):.2f}" stroke="{bar}" fill="none" stroke-width="1.5"/>'
        )
    for leaf in range(n):
        color = node_color.get(leaf, "#333333")
        x = sx(node_x[leaf])
        y = margin_t + plot_h + 14
        parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="11" fill="{color}" '
            f'text-anchor="end" transform="rotate(-55 {x:.2f} {y:.2f})">'
            f"{tree.leaves[leaf]}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
