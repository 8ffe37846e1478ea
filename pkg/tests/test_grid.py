import numpy as np
import pytest

from oracles import interpolant_expectation
from stable_clt_lab.errors import ValidationError
from stable_clt_lab.grid import GridFunction, GridSpec, hat_matrix
from stable_clt_lab.laws import CustomLaw, ParetoCutoffLaw


def test_nodes_symmetric_with_origin(grid):
    x = grid.nodes()
    assert x.size % 2 == 1
    assert x[(x.size - 1) // 2] == 0.0
    assert np.array_equal(x, -x[::-1])
    assert np.allclose(np.diff(x[np.abs(x) <= 8]), 1 / 64)
    assert x[-1] >= 1e7


def test_clamp_grid_and_roundtrip():
    g = GridSpec(4.0, 33, extension="clamp")
    assert g.nodes()[-1] == 4.0 and g.spacing == 0.25
    assert GridSpec.from_dict(g.to_dict()) == g
    with pytest.raises(ValidationError):
        GridSpec(4.0, 32)
    with pytest.raises(ValidationError):
        GridSpec(4.0, 33, extension="wrap")


def test_grid_function_interpolates(grid):
    u = GridFunction.sample(grid, np.cos)
    assert u.at_origin == 1.0
    assert u(0.3) == pytest.approx(np.cos(0.3), abs=1e-4)
    assert u.symmetry_gap() == 0.0
    with pytest.raises(ValidationError):
        GridFunction(grid, np.full(grid.nodes().size, np.nan))


@pytest.fixture(scope="module")
def small_matrix():
    g = GridSpec.from_spacing(4.0, 1 / 8)
    law = ParetoCutoffLaw(0.25, 0.5)
    return g.nodes(), law, hat_matrix(g.nodes(), law, 0.2)


def test_hat_matrix_is_stochastic_and_mirror(small_matrix):
    x, _, W = small_matrix
    assert np.max(np.abs(W.sum(axis=1) - 1)) < 1e-13
    assert W.min() >= -1e-15
    assert np.array_equal(W, W[::-1, ::-1])


def test_hat_matrix_integrates_interpolant_exactly(small_matrix):
    x, law, W = small_matrix
    u = np.sin(x) + 0.3 * np.cos(2 * x)
    s = 0.2
    for i in (0, 17, 40):
        total = interpolant_expectation(x, u, law, x[i], s)
        # far-field cells are ~5e5 wide, so moment differences lose ~1e-9 to cancellation
        assert W[i] @ u == pytest.approx(total, abs=1e-8)


def test_truncated_matrix_moves_excess_to_diagonal(small_matrix):
    x, law, W = small_matrix
    Wt = hat_matrix(x, law, 0.2, trunc=16.0)
    assert np.max(np.abs(Wt.sum(axis=1) - 1)) < 1e-13
    assert law.atom_mass(16.0) == pytest.approx(2 * law.sf(16.0))
    Wbig = hat_matrix(x, law, 0.2, trunc=1e12)
    assert np.max(np.abs(Wbig - W)) <= law.atom_mass(1e12) + 1e-14


def test_custom_matrix_rows_subset(small_matrix):
    x, law, W = small_matrix
    cust = CustomLaw(0.25, 0.5, [0.0, 3.0], [0.0, 0.0])
    rows = np.array([0, 17, 40])
    Wc = hat_matrix(x, cust, 0.2, rows=rows)
    assert np.max(np.abs(Wc - W[rows])) < 1e-9
