import numpy as np

from spaces.tensors import frobenius_weights, trace_vector


class Material(object):
    """
    Homogeneous isotropic material.

    Args:
        mu (float): Shear modulus.
        lam (float): First Lame parameter.
        dim (int): Spatial dimension n.
    """

    def __init__(self, mu=0.5, lam=1.0, dim=2):
        assert mu > 0 and lam > 0, 'Lame parameters must be positive'
        self.mu = float(mu)
        self.lam = float(lam)
        self.dim = dim

    @classmethod
    def from_cfg(cls, cfg, dim):
        section = cfg.get('material', {})

        return cls(section.get('mu', 0.5), section.get('lambda', 1.0), dim)

    @property
    def trace_factor(self):
        return self.lam / (2.0 * self.mu + self.dim * self.lam)

    def compliance_metric(self):
        """Matrix G with (A s):t = s^T G t in component storage."""
        trace = trace_vector(self.dim)

        return (np.diag(frobenius_weights(self.dim)) -
                self.trace_factor * np.outer(trace, trace)) / (2.0 * self.mu)

    def __repr__(self):
        return 'Material(mu={}, lam={}, dim={})'.format(self.mu, self.lam,
                                                      self.dim)


def apply_compliance(tau, material):
    """A tau = (tau - lam / (2 mu + n lam) tr(tau) I) / (2 mu) on (..., n, n)."""
    tau = np.asarray(tau, dtype=float)
    eye = np.eye(material.dim)
    trace = np.trace(tau, axis1=-2, axis2=-1)[..., None, None]

    return (tau - material.trace_factor * trace * eye) / (2.0 * material.mu)


def apply_stiffness(eps, material):
    """sigma = 2 mu eps + lam tr(eps) I, the inverse of apply_compliance."""
    eps = np.asarray(eps, dtype=float)
    eye = np.eye(material.dim)
    trace = np.trace(eps, axis1=-2, axis2=-1)[..., None, None]

    return 2.0 * material.mu * eps + material.lam * trace * eye
