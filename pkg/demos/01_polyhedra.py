"""Polyhedra on the Bloch sphere: generation, exact rationalization, hulls.

A measurement family is a set of unit Bloch vectors closed under antipodes.
The quality of the family is its shrinking factor eta: the radius of the
largest sphere inscribed in the convex hull. Finer families push eta toward 1.
"""

import numpy as np

from localpolytope import (
    faces_and_eta,
    geodesic_icosahedron,
    pentakis_dodecahedron,
    rationalize,
    rationalize_all,
    shrink_weights,
)

# Geodesic refinement: subdivide each icosahedron face k-fold, project onto the
# sphere, repeat. Vertices double as antipodal pairs, so m = len(vertices)/2
# measurements.
for schedule in ([], [2], [3], [3, 3]):
    verts = geodesic_icosahedron(schedule)
    print(f"schedule {schedule!r:8} -> {len(verts):4d} vertices (m = {len(verts)//2})")

# Floating-point vertices are snapped to rational points lying *exactly* on the
# unit sphere, via rational approximation of the half-angle tangents.
v = geodesic_icosahedron([3])[17]
q = rationalize(v, tol=1e-6)
print("\nfloat vertex   ", v)
print("rational vertex", tuple(str(c) for c in q.as_tuple()))
print("exactly on sphere:", q.x**2 + q.y**2 + q.z**2 == 1)

# The convex hull is computed with exact integer predicates, so eta^2 is an
# exact rational: certificates can consume it without any rounding worry.
points = rationalize_all(geodesic_icosahedron([]), tol=1e-9)
poly = faces_and_eta(points)
print(f"\nicosahedron: {len(poly.faces)} faces, eta^2 = {poly.eta_sq}")
print(f"             eta = {poly.eta:.6f}  (closed form: sqrt((5+2*sqrt5)/15) = 0.794654...)")

pent = faces_and_eta(rationalize_all(pentakis_dodecahedron(), tol=1e-6))
print(f"pentakis dodecahedron: {len(pent.faces)} faces, eta = {pent.eta:.6f}")

# Any shrunk direction eta * x_hat is a convex mixture of the vertices; that is
# the geometric fact that lets a finite family simulate all projective
# measurements up to eta.
rng = np.random.default_rng(0)
d = rng.normal(size=3)
d /= np.linalg.norm(d)
w = shrink_weights(poly, d)
arr = poly.vertex_array()
err = np.linalg.norm(arr.T @ w - poly.eta * d)
print(f"\nshrink weights: sum = {w.sum():.12f}, reconstruction error = {err:.2e}")
