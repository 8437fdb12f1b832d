"""Small geometric helpers shared across the package.

Angles live on a circle of circumference 2*pi; distances between cylinder
points use the product metric (radius, arc, height).
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def smoothstep(x):
    """Quintic step: 0 below 0, 1 above 1, C^2 at both ends."""
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


def ramp(x, a, b):
    """smoothstep((x-a)/(b-a)); degenerates to a hard step when a == b."""
    if b == a:
        return np.where(np.asarray(x) < a, 0.0, 1.0)
    return smoothstep((np.asarray(x, dtype=float) - a) / (b - a))


def hermite(x, x0, x1, y0, y1, m0, m1):
    """Cubic Hermite value on [x0, x1] with endpoint slopes m0, m1."""
    h = x1 - x0
    t = (np.asarray(x, dtype=float) - x0) / h
    t2 = t * t
    t3 = t2 * t
    return (y0 * (2 * t3 - 3 * t2 + 1) + h * m0 * (t3 - 2 * t2 + t)
            + y1 * (-2 * t3 + 3 * t2) + h * m1 * (t3 - t2))


def hermite_deriv(x, x0, x1, y0, y1, m0, m1):
    h = x1 - x0
    t = (np.asarray(x, dtype=float) - x0) / h
    t2 = t * t
    return (y0 * (6 * t2 - 6 * t) / h + m0 * (3 * t2 - 4 * t + 1)
            + y1 * (6 * t - 6 * t2) / h + m1 * (3 * t2 - 2 * t))


def wrap_2pi(theta):
    return np.mod(theta, TWO_PI)


def ang_diff(a, b):
    """Signed circle difference a - b in (-pi, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b) + math.pi, TWO_PI) - math.pi
    return np.where(d == -math.pi, math.pi, d) if np.ndim(d) else (
        math.pi if d == -math.pi else float(d))


def cyl_dist(p, q):
    """Product-metric distance between (r, theta, z) triples."""
    dr = p[0] - q[0]
    da = ang_diff(p[1], q[1])
    dz = p[2] - q[2]
    return math.sqrt(dr * dr + da * da + dz * dz)


def hausdorff(pts_a, pts_b, dist=cyl_dist) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    def one_way(xs, ys):
        worst = 0.0
        for x in xs:
            best = min(dist(x, y) for y in ys)
            worst = max(worst, best)
        return worst

    return max(one_way(pts_a, pts_b), one_way(pts_b, pts_a))


# ---------------------------------------------------------------------------
# planar polygon utilities (section-plane regions)

def polygon_area(poly) -> float:
    a = np.asarray(poly, dtype=float)
    x, y = a[:, 0], a[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def point_in_polygon(x: float, y: float, poly) -> bool:
    """Winding-number membership; boundary points count as inside."""
    wn = 0
    a = np.asarray(poly, dtype=float)
    n = len(a)
    for i in range(n):
        x0, y0 = a[i]
        x1, y1 = a[(i + 1) % n]
        if y0 <= y:
            if y1 > y and (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0) > 0:
                wn += 1
        elif y1 <= y and (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0) < 0:
            wn -= 1
    return wn != 0


def clip_to_sublevel(poly, func, tol: float = 1e-12):
    """Clip a closed polyline to {func <= 0}.

    Edge crossings are located by bisection, so func may be nonlinear; each
    edge is assumed to cross the zero set at most once (callers refine their
    polylines accordingly).
    """
    pts = [np.asarray(p, dtype=float) for p in poly]
    vals = [float(func(p[0], p[1])) for p in pts]
    out = []
    n = len(pts)
    for i in range(n):
        p0, p1 = pts[i], pts[(i + 1) % n]
        v0, v1 = vals[i], vals[(i + 1) % n]
        if v0 <= 0.0:
            out.append(p0)
        if (v0 <= 0.0) != (v1 <= 0.0):
            lo, hi = 0.0, 1.0
            flo = v0
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                pm = p0 + mid * (p1 - p0)
                fm = float(func(pm[0], pm[1]))
                if (flo <= 0.0) != (fm <= 0.0):
                    hi = mid
                else:
                    lo, flo = mid, fm
            out.append(p0 + 0.5 * (lo + hi) * (p1 - p0))
    return [tuple(p) for p in out]


def dedup_ring(poly, snap: float = 1e-12):
    """Drop consecutive duplicates (and a duplicated closing point)."""
    out = []
    for p in poly:
        if not out or max(abs(p[0] - out[-1][0]), abs(p[1] - out[-1][1])) > snap:
            out.append(p)
    if len(out) > 1 and max(abs(out[0][0] - out[-1][0]),
                            abs(out[0][1] - out[-1][1])) <= snap:
        out.pop()
    return out


def _seg_dist(p, a, b) -> float:
    ab = (b[0] - a[0], b[1] - a[1])
    ap = (p[0] - a[0], p[1] - a[1])
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    t = 0.0 if denom == 0 else max(0.0, min(1.0, (ap[0] * ab[0] + ap[1] * ab[1]) / denom))
    dx = p[0] - (a[0] + t * ab[0])
    dy = p[1] - (a[1] + t * ab[1])
    return math.hypot(dx, dy)


def polygon_separation(poly_a, poly_b) -> float:
    """Min distance between two disjoint polygon boundaries."""
    best = math.inf
    na, nb = len(poly_a), len(poly_b)
    for i in range(na):
        a0, a1 = poly_a[i], poly_a[(i + 1) % na]
        for j in range(nb):
            b0, b1 = poly_b[j], poly_b[(j + 1) % nb]
            best = min(best,
                       _seg_dist(a0, b0, b1), _seg_dist(a1, b0, b1),
                       _seg_dist(b0, a0, a1), _seg_dist(b1, a0, a1))
    return best


def bbox(poly):
    a = np.asarray(poly, dtype=float)
    return (float(a[:, 0].min()), float(a[:, 1].min()),
            float(a[:, 0].max()), float(a[:, 1].max()))


def bbox_disjoint(b1, b2) -> bool:
    return b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1]
