"""Symmetric polyhedra on the unit sphere with exact-rational vertices.

The pipeline needs antipode-closed vertex sets whose inscribed-sphere radius
(the shrinking factor eta) is certified.  Floating-point seed polyhedra come
from geodesic subdivision of the icosahedron; each vertex is then snapped to a
nearby rational point that lies exactly on the sphere via the half-angle
tangent parametrisation

    (x, y, z) = (2t/(1+t^2) * (1-u^2)/(1+u^2),
                 2t/(1+t^2) * 2u/(1+u^2),
                 (1-t^2)/(1+t^2)),   t = tan(phi/2), u = tan(theta/2),

which maps rational (t, u) to rational points with x^2+y^2+z^2 = 1 exactly.
Faces of the convex hull are computed with exact integer orientation
predicates, so eta^2 = min_f beta_f^2 comes out as an exact rational.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_PHI = (1 + math.sqrt(5)) / 2

ICOSAHEDRON_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def icosahedron():
    """The 12 unit vertices and 20 faces of a regular icosahedron."""
    t = _PHI
    raw = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    verts = np.asarray(raw, dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    return verts, list(ICOSAHEDRON_FACES)


def octahedron():
    verts = np.array(
        [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)],
        dtype=float,
    )
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
             (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return verts, faces


def dodecahedron():
    """20 unit vertices (no face list needed here)."""
    p = _PHI
    raw = [(sx, sy, sz) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    for a in (-1 / p, 1 / p):
        for b in (-p, p):
            raw += [(0, a, b), (a, b, 0), (b, 0, a)]
    verts = np.asarray(raw, dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    return verts


def pentakis_dodecahedron():
    """32 unit vertices: the dodecahedron plus its projected face centers.

    The centers sit along (+-1, +-1/phi, 0) and cyclic shifts, the dual
    icosahedron orientation for the dodecahedron coordinates used here.
    """
    p = _PHI
    apex = []
    for a in (-1.0, 1.0):
        for b in (-1 / p, 1 / p):
            apex += [(a, b, 0), (0, a, b), (b, 0, a)]
    apex = np.asarray(apex, dtype=float)
    apex /= np.linalg.norm(apex, axis=1, keepdims=True)
    return np.vstack([dodecahedron(), apex])


def _merge_key(p, tol=1e-9):
    return tuple(np.round(np.asarray(p) / tol).astype(np.int64))


def subdivide_projected(verts, faces, k, merge_tol=1e-9):
    """Split each triangle edge k-fold and project all vertices onto the sphere."""
    verts = [np.asarray(v, dtype=float) for v in verts]
    index = {_merge_key(v, merge_tol): i for i, v in enumerate(verts)}
    new_faces = []
    for (ai, bi, ci) in faces:
        a, b, c = verts[ai], verts[bi], verts[ci]
        grid = {}
        for i in range(k + 1):
            for j in range(k + 1 - i):
                p = (i * a + j * b + (k - i - j) * c) / k
                p = p / np.linalg.norm(p)
                key = _merge_key(p, merge_tol)
                if key not in index:
                    index[key] = len(verts)
                    verts.append(p)
                grid[(i, j)] = index[key]
        for i in range(k):
            for j in range(k - i):
                new_faces.append((grid[(i, j)], grid[(i + 1, j)], grid[(i, j + 1)]))
                if i + j < k - 1:
                    new_faces.append(
                        (grid[(i + 1, j)], grid[(i + 1, j + 1)], grid[(i, j + 1)])
                    )
    return verts, new_faces


def geodesic_icosahedron(subdivision_schedule=()):
    """Vertices of repeated k-fold subdivide-and-project of the icosahedron.

    An empty schedule returns the plain icosahedron; [3] gives 92 vertices,
    [3, 3] gives 812.
    """
    verts, faces = icosahedron()
    verts = list(verts)
    for k in subdivision_schedule:
        if k < 1:
            raise ValueError("subdivision factors must be >= 1")
        verts, faces = subdivide_projected(verts, faces, k)
    return [np.asarray(v) for v in verts]


# --- rational points on the sphere ----------------------------------------


@dataclass(frozen=True)
class RationalPoint:
    x: Fraction
    y: Fraction
    z: Fraction

    def __post_init__(self):
        if self.x * self.x + self.y * self.y + self.z * self.z != 1:
            raise ValueError("point is not exactly on the unit sphere")

    def __neg__(self):
        return RationalPoint(-self.x, -self.y, -self.z)

    def as_tuple(self):
        return (self.x, self.y, self.z)

    def to_float(self):
        return np.array([float(self.x), float(self.y), float(self.z)])


def _point_from_tangents(t, u):
    """Rational sphere point from half-angle tangents (u=None means theta=pi)."""
    st = 2 * t / (1 + t * t)          # sin(phi)
    ct = (1 - t * t) / (1 + t * t)    # cos(phi)
    if u is None:
        cu, su = Fraction(-1), Fraction(0)
    else:
        cu = (1 - u * u) / (1 + u * u)
        su = 2 * u / (1 + u * u)
    return RationalPoint(st * cu, st * su, ct)


def rationalize(p, tol=1e-6):
    """Nearest-enough rational point exactly on the unit sphere.

    The spherical angles of ``p`` are converted to half-angle tangents, those
    are replaced by continued-fraction convergents with the smallest
    denominator meeting ``tol``, and the rational parametrisation is applied.
    The distance check |p - q| <= tol is performed in exact arithmetic.
    """
    p = np.asarray(p, dtype=float)
    n = np.linalg.norm(p)
    if abs(n - 1) > 1e-9:
        raise ValueError("input point must be on the unit sphere within 1e-9")
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = p / n
    x, y, z = p
    target = (Fraction(p[0]), Fraction(p[1]), Fraction(p[2]))
    tol_sq = Fraction(tol) ** 2

    sin_phi = math.hypot(x, y)
    if sin_phi == 0.0:
        return RationalPoint(Fraction(0), Fraction(0), Fraction(1 if z > 0 else -1))
    phi = math.atan2(sin_phi, z)
    theta = math.atan2(y, x)
    t_exact = math.tan(phi / 2)
    u_exact = None if abs(theta - math.pi) < 1e-15 else math.tan(theta / 2)

    cap = 4
    while True:
        t = Fraction(t_exact).limit_denominator(cap)
        u = None if u_exact is None else Fraction(u_exact).limit_denominator(cap)
        q = _point_from_tangents(t, u)
        d2 = sum((a - b) ** 2 for a, b in zip(q.as_tuple(), target))
        if d2 <= tol_sq:
            return q
        if cap > 2**80:
            raise RuntimeError("rational approximation did not converge")
        cap *= 8


# --- exact convex hull -----------------------------------------------------


def _homogeneous(pt):
    """(x, y, z, d) integers with d > 0 representing (x/d, y/d, z/d)."""
    x, y, z = pt.as_tuple()
    d = math.lcm(x.denominator, y.denominator, z.denominator)
    return (
        x.numerator * (d // x.denominator),
        y.numerator * (d // y.denominator),
        z.numerator * (d // z.denominator),
        d,
    )


def _orient(p, q, r, s):
    """Sign of det[q-p; r-p; s-p] for homogeneous integer points."""
    px, py, pz, pd = p
    ax = q[0] * pd - px * q[3]
    ay = q[1] * pd - py * q[3]
    az = q[2] * pd - pz * q[3]
    bx = r[0] * pd - px * r[3]
    by = r[1] * pd - py * r[3]
    bz = r[2] * pd - pz * r[3]
    cx = s[0] * pd - px * s[3]
    cy = s[1] * pd - py * s[3]
    cz = s[2] * pd - pz * s[3]
    det = (
        ax * (by * cz - bz * cy)
        - ay * (bx * cz - bz * cx)
        + az * (bx * cy - by * cx)
    )
    return (det > 0) - (det < 0)


@dataclass(frozen=True)
class Face:
    """Supporting plane <a_f, r> <= beta_f of one hull facet."""

    normal: np.ndarray          # unit outward normal, float
    beta: float                 # distance of the plane from the origin
    beta_sq: Fraction           # exact beta^2
    vertices: tuple             # indices of the three defining vertices
    normal_exact: tuple         # exact (unnormalised) rational outward normal
    offset_exact: Fraction      # exact <normal_exact, vertex>

    def distance_sq(self):
        return self.beta_sq


@dataclass(frozen=True)
class RationalPolyhedron:
    vertices: tuple             # RationalPoint, closed under antipodes
    faces: tuple
    eta_sq: Fraction

    @property
    def eta(self):
        return math.sqrt(float(self.eta_sq))

    def vertex_array(self):
        return np.array([v.to_float() for v in self.vertices])


def _exact_hull_faces(points):
    """Triangulated convex hull of exact rational points, as index triples.

    Incremental insertion with exact integer predicates.  Points exactly on a
    supporting plane are treated as non-extreme, which never changes the face
    planes.  All inputs are assumed distinct.
    """
    n = len(points)
    hpts = [_homogeneous(p) for p in points]
    order = list(range(n))

    # initial tetrahedron: first point, then greedy search for independence
    i0 = order[0]
    i1 = next(i for i in order[1:] if hpts[i] != hpts[i0])

    def cross_nonzero(a, b, c):
        ax = b[0] * a[3] - a[0] * b[3]
        ay = b[1] * a[3] - a[1] * b[3]
        az = b[2] * a[3] - a[2] * b[3]
        bx = c[0] * a[3] - a[0] * c[3]
        by = c[1] * a[3] - a[1] * c[3]
        bz = c[2] * a[3] - a[2] * c[3]
        return (
            ay * bz - az * by != 0 or az * bx - ax * bz != 0 or ax * by - ay * bx != 0
        )

    i2 = next(
        (i for i in order if i not in (i0, i1) and cross_nonzero(hpts[i0], hpts[i1], hpts[i])),
        None,
    )
    if i2 is None:
        raise ValueError("degenerate input: all points collinear")
    i3 = next(
        (i for i in order if i not in (i0, i1, i2) and _orient(hpts[i0], hpts[i1], hpts[i2], hpts[i]) != 0),
        None,
    )
    if i3 is None:
        raise ValueError("degenerate input: all points coplanar")

    # interior reference point: centroid of the initial tetrahedron
    cx = sum(Fraction(hpts[i][0], hpts[i][3]) for i in (i0, i1, i2, i3)) / 4
    cy = sum(Fraction(hpts[i][1], hpts[i][3]) for i in (i0, i1, i2, i3)) / 4
    cz = sum(Fraction(hpts[i][2], hpts[i][3]) for i in (i0, i1, i2, i3)) / 4
    dd = math.lcm(cx.denominator, cy.denominator, cz.denominator)
    interior = (
        cx.numerator * (dd // cx.denominator),
        cy.numerator * (dd // cy.denominator),
        cz.numerator * (dd // cz.denominator),
        dd,
    )

    def oriented(a, b, c):
        # store faces so that the interior point lies strictly below
        if _orient(hpts[a], hpts[b], hpts[c], interior) > 0:
            return (b, a, c)
        return (a, b, c)

    faces = {
        oriented(i0, i1, i2),
        oriented(i0, i1, i3),
        oriented(i0, i2, i3),
        oriented(i1, i2, i3),
    }

    for i in order:
        if i in (i0, i1, i2, i3):
            continue
        p = hpts[i]
        visible = [f for f in faces if _orient(hpts[f[0]], hpts[f[1]], hpts[f[2]], p) > 0]
        if not visible:
            continue
        edge_count = {}
        for f in visible:
            for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                key = (min(e), max(e))
                edge_count[key] = edge_count.get(key, 0) + 1
        for f in visible:
            faces.remove(f)
        for (u, v), cnt in edge_count.items():
            if cnt == 1:
                faces.add(oriented(u, v, i))
    return faces, hpts, interior


def close_under_antipodes(points):
    seen = {p.as_tuple(): p for p in points}
    out = list(points)
    added = 0
    for p in points:
        anti = (-p.x, -p.y, -p.z)
        if anti not in seen:
            q = -p
            seen[anti] = q
            out.append(q)
            added += 1
    return out, added


def faces_and_eta(vertices):
    """Exact faces and shrinking factor of the hull of rational sphere points.

    The vertex set is closed under antipodes first (with a warning if that
    changes it).  Returns a RationalPolyhedron whose eta_sq is the exact
    minimum of beta_f^2 over faces.
    """
    if len(vertices) < 4:
        raise ValueError("need at least 4 vertices")
    points, added = close_under_antipodes(list(vertices))
    if added:
        warnings.warn(f"input not closed under antipodes; added {added} points")
    # drop exact duplicates
    uniq = {}
    for p in points:
        uniq.setdefault(p.as_tuple(), p)
    points = list(uniq.values())

    face_idx, hpts, interior = _exact_hull_faces(points)

    faces = []
    eta_sq = None
    for (a, b, c) in face_idx:
        pa, pb, pc = points[a], points[b], points[c]
        ux, uy, uz = pb.x - pa.x, pb.y - pa.y, pb.z - pa.z
        vx, vy, vz = pc.x - pa.x, pc.y - pa.y, pc.z - pa.z
        nx, ny, nz = uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx
        off = nx * pa.x + ny * pa.y + nz * pa.z
        # orient outward: the interior reference lies strictly below the plane
        ival = nx * Fraction(interior[0], interior[3]) + ny * Fraction(
            interior[1], interior[3]
        ) + nz * Fraction(interior[2], interior[3])
        if ival > off:
            nx, ny, nz, off = -nx, -ny, -nz, -off
        if off <= 0:
            raise ValueError("hull does not contain the sphere center")
        nsq = nx * nx + ny * ny + nz * nz
        beta_sq = off * off / nsq
        fl = np.array([float(nx), float(ny), float(nz)])
        fl /= np.linalg.norm(fl)
        faces.append(
            Face(
                normal=fl,
                beta=math.sqrt(float(beta_sq)),
                beta_sq=beta_sq,
                vertices=(a, b, c),
                normal_exact=(nx, ny, nz),
                offset_exact=off,
            )
        )
        if eta_sq is None or beta_sq < eta_sq:
            eta_sq = beta_sq

    # soundness audit: every vertex satisfies every face inequality exactly
    for f in faces:
        nx, ny, nz = f.normal_exact
        for p in points:
            if nx * p.x + ny * p.y + nz * p.z > f.offset_exact:
                raise AssertionError("hull construction produced a violated face")

    return RationalPolyhedron(tuple(points), tuple(faces), eta_sq)


def rationalize_all(float_vertices, tol=1e-6):
    """Rationalize a float vertex list and close it under exact antipodes.

    Antipodal float pairs are mapped to exact negations of each other so the
    closure does not double the vertex count.
    """
    out = []
    seen = {}
    for v in float_vertices:
        key = _merge_key(v, 1e-9)
        anti = _merge_key(-np.asarray(v), 1e-9)
        if key in seen:
            continue
        q = rationalize(v, tol)
        out.append(q)
        seen[key] = q
        if anti not in seen:
            out.append(-q)
            seen[anti] = -q
    return out


def shrink_weights(poly, direction, tol=1e-12):
    """Convex weights p_x over the vertices with sum_x p_x a_x = eta * direction.

    Locates the face met by the ray along ``direction``, solves the local
    barycentric system there, and pads the leftover mass with an antipodal
    vertex pair (whose mean is the origin).
    """
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    eta = poly.eta
    target = eta * d

    best = None
    for f in poly.faces:
        a = float(np.dot(f.normal, d))
        if a <= 0:
            continue
        r = f.beta / a
        if best is None or r < best[0] - 1e-15:
            best = (r, f)
    if best is None:
        raise RuntimeError("direction outside all face cones")
    r_exit, face = best

    V = poly.vertex_array()
    tri = V[list(face.vertices)].T
    exit_point = r_exit * d
    mu = np.linalg.solve(tri, exit_point)
    if mu.min() < -1e-9:
        # coplanar triangulation can put the exit point in a neighbour triangle
        mu = None
        for f in poly.faces:
            a = float(np.dot(f.normal, d))
            if a <= 0 or abs(f.beta / a - r_exit) > 1e-9:
                continue
            cand = np.linalg.solve(V[list(f.vertices)].T, exit_point)
            if cand.min() >= -1e-12:
                mu, face = cand, f
                break
        if mu is None:
            raise RuntimeError("failed to locate the exit face")
    mu = np.clip(mu, 0.0, None)

    t = eta / r_exit
    weights = np.zeros(len(poly.vertices))
    for k, vi in enumerate(face.vertices):
        weights[vi] += t * mu[k]
    # remaining mass on an antipodal pair, contributing zero
    rest = 1.0 - weights.sum()
    v0 = poly.vertices[0]
    j = next(i for i, q in enumerate(poly.vertices) if q.as_tuple() == (-v0.x, -v0.y, -v0.z))
    weights[0] += rest / 2
    weights[j] += rest / 2

    err = np.linalg.norm(V.T @ weights - target)
    if err > 1e-8:
        raise RuntimeError(f"shrink reconstruction error {err}")
    return weights


# --- file format ------------------------------------------------------------


def write_polyhedron_vertices(vertices, fp):
    for p in vertices:
        x, y, z = p.as_tuple()
        fp.write(
            f"{x.numerator}/{x.denominator} "
            f"{y.numerator}/{y.denominator} "
            f"{z.numerator}/{z.denominator}\n"
        )


def read_polyhedron_vertices(fp):
    pts = []
    for line in fp:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        xs = line.split()
        if len(xs) != 3:
            raise ValueError(f"bad vertex line {line!r}")
        pts.append(RationalPoint(Fraction(xs[0]), Fraction(xs[1]), Fraction(xs[2])))
    return pts


def antipodal_representatives(vertices):
    """One vertex from each antipodal pair, in stable order."""
    reps = []
    seen = set()
    for p in vertices:
        if p.as_tuple() in seen:
            continue
        seen.add(p.as_tuple())
        seen.add((-p.x, -p.y, -p.z))
        reps.append(p)
    return reps
