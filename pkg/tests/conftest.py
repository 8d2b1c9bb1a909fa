import pytest

from localpolytope.polyhedra import (
    antipodal_representatives,
    faces_and_eta,
    geodesic_icosahedron,
    rationalize_all,
)
from localpolytope.states import chsh_vectors, singlet_tensor


@pytest.fixture(scope="session")
def ico_points():
    return rationalize_all(geodesic_icosahedron([]), tol=1e-9)


@pytest.fixture(scope="session")
def ico_poly(ico_points):
    return faces_and_eta(ico_points)


@pytest.fixture(scope="session")
def ico_singlet(ico_points):
    reps = antipodal_representatives(ico_points)
    vecs = [p.as_tuple() for p in reps]
    return singlet_tensor(vecs, vecs)


@pytest.fixture(scope="session")
def chsh_singlet():
    alice, bob = chsh_vectors()
    return singlet_tensor(alice.tolist(), bob.tolist())
