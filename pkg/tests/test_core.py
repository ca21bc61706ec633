import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptsweep import (
    BarycentricModel,
    FrequencyGrid,
    PoleResidueModel,
    SampleSet,
    SingularResolventError,
    StateSpaceModel,
    evaluate_model,
    make_grid,
)
from adaptsweep.loewner import alternate_split, build_loewner, state_space_interpolant

from conftest import first_order


def test_grid_endpoints_only():
    g = make_grid(0.0, 1.0, 2)
    np.testing.assert_array_equal(g.points, [0.0, 2j * np.pi])


def test_grid_ghz_band():
    g = make_grid(1e9, 10e9, 400)
    assert len(g) == 400
    assert g.points[0] == 1j * 2 * np.pi * 1e9
    assert g.points[-1] == 1j * 2 * np.pi * 10e9
    assert g.f_min == 1e9 and g.f_max == 10e9


def test_grid_spacing():
    g = make_grid(20e9, 60e9, 400)
    np.testing.assert_allclose(np.diff(g.points.imag), 2 * np.pi * 40e9 / 399, rtol=1e-9)


@pytest.mark.parametrize("args", [(1.0, 2.0, 1), (1.0, 2.0, 0), (1.0, 2.0, -3), (2.0, 1.0, 10), (1.0, 1.0, 5), (1.0, 2.0, 2.5)])
def test_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


@given(
    st.floats(0, 1e10, allow_nan=False),
    st.floats(1e3, 1e10, allow_nan=False),
    st.integers(2, 2000),
)
@settings(max_examples=60, deadline=None)
def test_grid_invariants(f_min, width, n):
    g = make_grid(f_min, f_min + width, n)
    assert len(g) == n
    assert np.all(np.diff(g.points.imag) > 0)
    assert np.all(g.points.real == 0)
    assert g.f_min == f_min
    assert g.points[-1] == 1j * 2 * np.pi * (f_min + width)


def test_grid_index_of(grid400):
    assert grid400.index_of(grid400.points[7]) == 7
    with pytest.raises(KeyError):
        grid400.index_of(grid400.points[7] + 1j * 1e3)


def test_grid_rejects_off_axis():
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([1 + 1j, 2j]))


def test_sampleset_contract():
    s = np.array([1j, 3j, 2j])
    ss = SampleSet(s, np.arange(3).reshape(3, 1, 1))
    assert (ss.p, ss.m, len(ss)) == (1, 1, 3)
    np.testing.assert_array_equal(ss.sorted().s, [1j, 2j, 3j])
    np.testing.assert_array_equal(ss.sorted().values[:, 0, 0], [0, 2, 1])
    with pytest.raises(ValueError):
        SampleSet(np.array([1j, 1j]), np.zeros((2, 1, 1)))
    with pytest.raises(ValueError):
        SampleSet(np.array([1j]), np.array([[[np.nan]]]))
    with pytest.raises(ValueError):
        ss.append(1j, np.zeros((1, 1)))


def test_pole_residue_direct_substitution():
    model = PoleResidueModel(np.array([-1.0 + 0j]), np.ones((1, 1, 1), complex), np.zeros((1, 1)), np.zeros((1, 1)))
    np.testing.assert_allclose(model.evaluate(1j)[0, 0, 0], 1 / (1j + 1), rtol=1e-15)
    assert model.form == "pole-residue"


def test_barycentric_returns_node_values():
    nodes = np.array([1j, 2j, 3j])
    values = np.array([5.0, -1.0 + 2j, 0.25]).reshape(3, 1, 1)
    model = BarycentricModel(nodes, values, np.array([0.3, -0.5, 0.2], complex))
    np.testing.assert_array_equal(model.evaluate(nodes), values)


def test_state_space_from_first_order_samples():
    s = 1j * np.array([0.5, 1.0, 2.0, 4.0])
    model = state_space_interpolant(build_loewner(alternate_split(SampleSet(s, first_order(s)))))
    probe = 1j * np.linspace(0.1, 5.0, 37)
    np.testing.assert_allclose(evaluate_model(model, probe), first_order(probe), atol=1e-10)


def test_state_space_singular_resolvent():
    model = StateSpaceModel(np.array([[2j]]), np.ones((1, 1)), np.ones((1, 1)), np.zeros((1, 1)))
    with pytest.raises(SingularResolventError):
        model.evaluate(np.array([1j, 2j]))


def test_evaluate_model_grid_shape(grid400, order8_2x2):
    model = PoleResidueModel(order8_2x2.poles, order8_2x2.residues, order8_2x2.const, np.zeros((2, 2)))
    out = evaluate_model(model, grid400)
    assert out.shape == (400, 2, 2)
    np.testing.assert_allclose(out, order8_2x2.evaluate(grid400.points), rtol=1e-13, atol=1e-15)
