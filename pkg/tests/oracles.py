"""Brute-force reference computations used to check the vectorized kernels.

Nothing here imports the geometry or reward modules.
"""

import math
from collections import deque

import numpy as np
from matplotlib.path import Path


def owner_pixel(mask, x, y):
    H, W = mask.shape
    if not (0 <= x <= 1 and 0 <= y <= 1):
        return None
    col = W - 1 if x == 1 else int(x * W // 1)
    row = H - 1 if y == 1 else int(y * H // 1)
    return row, min(col, W - 1)


def black(mask, x, y):
    idx = owner_pixel(mask, x, y)
    if idx is None:
        return False
    r, c = idx
    return bool(mask[min(r, mask.shape[0] - 1), c])


def min_samples(length, D):
    """Linear search for the smallest m with length / (m + 1) < D."""
    m = 0
    while not length / (m + 1) < D:
        m += 1
    return m


def march(mask, origin, direction, step):
    """One test point at a time."""
    j = 0
    while True:
        x = origin[0] + (j + 1) * step * direction[0]
        y = origin[1] + (j + 1) * step * direction[1]
        if not black(mask, x, y):
            return j * step
        j += 1


def centers_in_polygon(mask_shape, vertices):
    """Pixel-center containment by matplotlib's point-in-path test."""
    H, W = mask_shape
    xs = (np.arange(W) + 0.5) / W
    ys = (np.arange(H) + 0.5) / H
    px, py = np.meshgrid(xs, ys)
    pts = np.stack([px.ravel(), py.ravel()], axis=1)
    path = Path(np.asarray(vertices, dtype=float), closed=False)
    return path.contains_points(pts).reshape(H, W)


def covered_count(mask, polygons):
    union = np.zeros(mask.shape, dtype=bool)
    for verts in polygons:
        union |= centers_in_polygon(mask.shape, verts)
    return int((union & mask).sum())


def flood_components(mask):
    """8-connected component count by BFS."""
    H, W = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    count = 0
    for r in range(H):
        for c in range(W):
            if mask[r, c] and not seen[r, c]:
                count += 1
                q = deque([(r, c)])
                seen[r, c] = True
                while q:
                    a, b = q.popleft()
                    for da in (-1, 0, 1):
                        for db in (-1, 0, 1):
                            na, nb = a + da, b + db
                            if 0 <= na < H and 0 <= nb < W and mask[na, nb] and not seen[na, nb]:
                                seen[na, nb] = True
                                q.append((na, nb))
    return count


def boundary_length(mask):
    """Exposed pixel edges, horizontal edges weighted 1/W and vertical ones 1/H."""
    H, W = mask.shape
    total = 0.0
    for r in range(H):
        for c in range(W):
            if not mask[r, c]:
                continue
            if r == 0 or not mask[r - 1, c]:
                total += 1 / W
            if r == H - 1 or not mask[r + 1, c]:
                total += 1 / W
            if c == 0 or not mask[r, c - 1]:
                total += 1 / H
            if c == W - 1 or not mask[r, c + 1]:
                total += 1 / H
    return total


def discard_chain(distances, temperature, base_rate):
    """Scalar evaluation of the masking probability chain."""
    w = [math.exp(-d / temperature) for d in distances]
    mean = sum(w) / len(w)
    return [min(max(base_rate * wi / mean, 0.0), 1.0) for wi in w]


def coverage_polygon(mask, p_s, p_e, D, lam, step):
    """Scalar rebuild of a stroke's coverage polygon, one ray at a time."""
    L = math.hypot(p_e[0] - p_s[0], p_e[1] - p_s[1])
    m = min_samples(L, D)
    tx, ty = (p_e[0] - p_s[0]) / L, (p_e[1] - p_s[1]) / L
    nx, ny = -ty, tx
    # Ordered from p_s to p_e: the i-th interior point is nearest p_e for i = 1.
    pts = [p_s]
    for i in range(m, 0, -1):
        pts.append(((i * p_s[0] + (m + 1 - i) * p_e[0]) / (m + 1), (i * p_s[1] + (m + 1 - i) * p_e[1]) / (m + 1)))
    pts.append(p_e)
    dp = [march(mask, p, (nx, ny), step) for p in pts]
    dm = [march(mask, p, (-nx, -ny), step) for p in pts]
    mean = sum(dp + dm) / (2 * len(pts))
    normal = [k for k in range(len(pts)) if not max(dp[k], dm[k]) > lam * mean]
    refined = sum(dp[k] + dm[k] for k in normal) / (2 * len(normal)) if normal else mean
    cap = lam * refined
    dp = [min(d, cap) for d in dp]
    dm = [min(d, cap) for d in dm]
    ls, le = (dp[0] + dm[0]) / 2, (dp[-1] + dm[-1]) / 2
    upper = [(x + d * nx, y + d * ny) for (x, y), d in zip(pts, dp)]
    lower = [(x - d * nx, y - d * ny) for (x, y), d in zip(pts, dm)]
    start = (p_s[0] - ls * tx, p_s[1] - ls * ty)
    end = (p_e[0] + le * tx, p_e[1] + le * ty)
    return [start, *upper, end, *reversed(lower)]
