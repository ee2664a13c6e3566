"""
🦓 Pruebas del zoológico de ejemplos
"""

import numpy as np
import pytest

from gkverify.core.errors import UnknownZooExampleError
from gkverify.core.harness import parse_spec
from gkverify.core.zoo import ZOO, sample_four_dim_points, zoo_generate
from tests.conftest import ZOO_DIR


@pytest.mark.parametrize("name", sorted(ZOO))
def test_bundled_files_match_generator(name):
    bundled = parse_spec((ZOO_DIR / f"{name.lower()}.json").read_text(encoding="utf-8"))
    assert bundled.model_dump() == zoo_generate(name).model_dump()


def test_z1_parameters():
    spec = zoo_generate("z1", {"alpha": 0.36, "beta": 0.48, "gamma": 0.8, "n": 2})
    assert spec.dim == 8
    assert spec.parameters == {"alpha": 0.36, "beta": 0.48, "gamma": 0.8}
    assert len(spec.jminus) == 8


def test_z1_rejects_non_unit_coefficients():
    with pytest.raises(UnknownZooExampleError):
        zoo_generate("Z1", {"alpha": 0.5, "beta": 0.5})


def test_z1_rejects_dimension():
    with pytest.raises(UnknownZooExampleError):
        zoo_generate("Z1", {"n": 3})


def test_z3_requires_distinct_bands():
    with pytest.raises(UnknownZooExampleError):
        zoo_generate("Z3", {"a1": 0.2, "a2": 0.2})


def test_z4_on_z1_base():
    spec = zoo_generate("Z4", {"base": "Z1"})
    assert spec.dim == 4
    assert spec.b[1][2] == "x1" and spec.b[2][1] == "-x1"


def test_unknown_example():
    with pytest.raises(UnknownZooExampleError) as info:
        zoo_generate("Z9")
    assert info.value.exit_code == 2


def test_non_numeric_parameter():
    with pytest.raises(UnknownZooExampleError):
        zoo_generate("Z2", {"ca": "mucho"})


def test_z5_is_a_sampler():
    spec = zoo_generate("Z5", {"mode": "generic", "samples": 10})
    assert spec.sampler.mode == "generic"
    assert spec.metric is None


def test_sampler_is_reproducible():
    first = sample_four_dim_points(3, seed=11)
    second = sample_four_dim_points(3, seed=11)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.b, b.b)
        np.testing.assert_array_equal(a.g, b.g)


def test_sampled_structures_are_compatible():
    for data in sample_four_dim_points(20, seed=2):
        for j in (data.j_plus, data.j_minus):
            np.testing.assert_allclose(j @ j, -np.eye(4), atol=1e-10)
            np.testing.assert_allclose(j.T @ data.g @ j, data.g, atol=1e-10)
        assert abs(data.a) < 0.8 + 1e-12
        np.testing.assert_allclose(data.b, -data.b.T, atol=1e-12)
