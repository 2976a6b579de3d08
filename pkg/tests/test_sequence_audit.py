import pytest

from meshes.macro_splits import split_unit_mesh
from verify.sequence_audit import macro_counts, sequence_audit


def test_macro_counts(square_macros):
    assert macro_counts(square_macros) == {'V': 4, 'E': 5, 'E_interior': 1,
                                           'M': 2}


def test_audit_on_two_macros(square_macros):
    report = sequence_audit(square_macros)
    assert report['dims'] == {'U_h': 39, 'Sigma_h': 84, 'V_h': 48}
    assert report['alternating_sum'] == 3
    assert report['euler'] == 0
    assert report['checks']['inclusion']
    assert report['pass']


@pytest.mark.slow
def test_audit_on_refined_mesh():
    report = sequence_audit(split_unit_mesh(2, '2d-p2', 2))
    assert report['alternating_sum'] == 3
    assert report['pass']


def test_audit_is_2d_only():
    with pytest.raises(AssertionError):
        sequence_audit(split_unit_mesh(3, '3d-p2', 1))
