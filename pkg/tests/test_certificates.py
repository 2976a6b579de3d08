import numpy as np
import pytest

from spaces.bubbles import macro_bubble_space
from verify.certificates import (REFERENCE_VERTICES, Certificate,
                                 divergence_matrix, is_well_shaped,
                                 macro_from_vertices,
                                 random_geometry_certificate, random_simplex,
                                 rank_certificate, rigid_motion_pairing,
                                 simplex_angles)


@pytest.mark.parametrize('family,rank,n_u', [('2d-p2', 21, 24),
                                             ('3d-p3', 114, 120),
                                             ('3d-p2', 138, 144)])
def test_reference_certificates(family, rank, n_u):
    certificate = rank_certificate(family)
    assert certificate.passed
    assert certificate.rank == rank
    assert certificate.n_u == n_u


def test_constrained_family_gap():
    assert rank_certificate('3d-p2').sv_gap >= 1e6


@pytest.mark.parametrize('family,n_u', [('2d-p2', 24), ('3d-p2', 144)])
def test_divergence_is_orthogonal_to_rigid_motions(family, n_u):
    dim = 3 if family.startswith('3d') else 2
    macro_mesh, macro = macro_from_vertices(REFERENCE_VERTICES[dim], family)
    bubbles = macro_bubble_space(macro_mesh, macro, family)
    b_div = divergence_matrix(macro_mesh, macro, bubbles)
    assert b_div.shape == (n_u, bubbles.dim)
    pairing = rigid_motion_pairing(macro_mesh, macro, bubbles)
    assert np.allclose(pairing, 0.0, atol=1e-10)


def test_random_2d_certificates():
    certificates = random_geometry_certificate('2d-p2', trials=3, seed=7,
                                               n_jobs=1)
    assert len(certificates) == 3
    assert all(c.passed for c in certificates)


def test_random_trials_are_seeded():
    first = random_geometry_certificate('2d-p2', trials=2, seed=11, n_jobs=1)
    second = random_geometry_certificate('2d-p2', trials=2, seed=11,
                                         n_jobs=1)
    assert [c.geometry for c in first] == [c.geometry for c in second]


@pytest.mark.slow
@pytest.mark.parametrize('family', ['2d-p2', '3d-p3', '3d-p2'])
def test_many_random_certificates(family):
    certificates = random_geometry_certificate(family, trials=20)
    assert all(c.passed for c in certificates)


def test_angle_filter(rng):
    assert np.allclose(sorted(simplex_angles([[0, 0], [1, 0], [0, 1]])),
                       [45.0, 45.0, 90.0])
    assert not is_well_shaped([[0, 0], [1, 0], [0.5, 0.01]])
    assert not is_well_shaped([[0, 0], [1, 0], [2, 0]])
    assert is_well_shaped(random_simplex(rng, 3))


def test_certificate_dict():
    failed = Certificate('2d-p2', 24, 18, 20, 21, 3.0, [[0, 0], [1, 0]])
    out = failed.to_dict()
    assert not out['pass']
    assert out['geometry'] == [[0, 0], [1, 0]]
    assert set(out) == {'family', 'N_u', 'N_sigma', 'rank', 'required',
                        'sv_gap', 'pass', 'geometry'}
    assert 'geometry' not in rank_certificate('2d-p2').to_dict()
