import numpy as np
import pytest

from assembly.material import Material, apply_compliance, apply_stiffness
from spaces.tensors import from_matrix


def test_compliance_of_identity(material2d):
    assert np.allclose(apply_compliance(np.eye(2), material2d),
                       np.eye(2) / 3.0)


@pytest.mark.parametrize('dim', [2, 3])
def test_stiffness_inverts_compliance(rng, dim):
    material = Material(0.7, 2.3, dim)
    a = rng.normal(size=(5, dim, dim))
    eps = a + np.swapaxes(a, 1, 2)
    back = apply_compliance(apply_stiffness(eps, material), material)
    assert np.allclose(back, eps, atol=1e-13)


def test_trace_free_stress(material3d):
    tau = np.diag([1.0, -2.0, 1.0])
    assert np.allclose(apply_compliance(tau, material3d), tau)


@pytest.mark.parametrize('dim', [2, 3])
def test_metric_matches_compliance(rng, dim):
    material = Material(0.5, 1.0, dim)
    a, b = rng.normal(size=(2, dim, dim))
    s, t = a + a.T, b + b.T
    lhs = from_matrix(s, dim) @ material.compliance_metric() @ \
        from_matrix(t, dim)
    assert np.isclose(lhs, np.sum(apply_compliance(s, material) * t))


def test_from_cfg():
    material = Material.from_cfg({'material': {'mu': 2.0, 'lambda': 3.0}}, 3)
    assert (material.mu, material.lam, material.dim) == (2.0, 3.0, 3)
    assert Material.from_cfg({}, 2).mu == 0.5


def test_rejects_non_positive_parameters():
    with pytest.raises(AssertionError):
        Material(0.0, 1.0, 2)
