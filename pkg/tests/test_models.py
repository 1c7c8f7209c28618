import math

import numpy as np
import pytest
from scipy.special import expit

from cubelab.errors import CapabilityError
from cubelab.models import BitsMixture, CurieWeiss, IndependentBits, IsingGrid, exact_target
from cubelab.statespace import all_signs, state_of

ALL_SMALL_MODELS = [
    IndependentBits(0.5, 4),
    BitsMixture(0.5, 4),
    IsingGrid(2, 2, 0.4, 0.1),
    IsingGrid(2, 3, 0.3, -0.2, periodic=True),
    CurieWeiss(0.3, 0.5, 4),
]


def grid_edges(rows, cols, periodic):
    """Independent edge enumeration used as the oracle for the grid model."""
    edges = []
    idx = lambda r, c: r * cols + c
    for r in range(rows):
        for c in range(cols):
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
    if periodic and rows >= 3:
        edges += [(idx(rows - 1, c), idx(0, c)) for c in range(cols)]
    if periodic and cols >= 3:
        edges += [(idx(r, cols - 1), idx(r, 0)) for r in range(rows)]
    return edges


def test_log_weight_values():
    assert IndependentBits(0.5, 3).log_weight(state_of(7, 3)) == pytest.approx(1.5)
    assert CurieWeiss(1.0, 0.0, 3).log_weight(state_of(7, 3)) == pytest.approx(9.0)
    # 2x2 free-boundary grid has 4 edges
    assert IsingGrid(2, 2, 1.0, 0.0).log_weight(state_of(15, 4)) == pytest.approx(4.0)


@pytest.mark.parametrize("rows,cols,periodic", [(2, 2, False), (3, 3, False),
                                                (3, 3, True), (2, 3, True), (1, 4, False)])
def test_ising_log_weight_matches_edge_enumeration(rows, cols, periodic):
    model = IsingGrid(rows, cols, 0.7, -0.3, periodic)
    edges = grid_edges(rows, cols, periodic)
    signs = all_signs(model.dim).astype(float)
    expected = 0.7 * sum(signs[:, i] * signs[:, j] for i, j in edges) - 0.3 * signs.sum(1)
    np.testing.assert_allclose(model.log_weight_signs(signs), expected, atol=1e-12)


def test_exact_target_uniform_when_flat():
    for model in (IndependentBits(0.0, 5), IsingGrid(2, 2, 0.0, 0.0), CurieWeiss(0.0, 1.0, 5)):
        p = exact_target(model)
        np.testing.assert_allclose(p, 1.0 / p.size, atol=1e-15)


def test_exact_target_single_bit():
    beta = 0.7
    p = exact_target(IndependentBits(beta, 1))
    np.testing.assert_allclose(p, [expit(-2 * beta), expit(2 * beta)], atol=1e-15)


def test_mixture_symmetry_and_composition():
    beta, d = 0.5, 6
    mix = exact_target(BitsMixture(beta, d))
    np.testing.assert_allclose(mix, mix[::-1], atol=1e-15)  # values[k] = values[2^d-1-k]
    bits = exact_target(IndependentBits(beta, d))
    np.testing.assert_allclose(mix, 0.5 * bits + 0.5 * bits[::-1], atol=1e-14)


def test_ising_zero_coupling_equals_bits():
    grid = IsingGrid(2, 4, 0.0, 0.35)
    bits = IndependentBits(0.35, 8)
    signs = all_signs(8).astype(float)
    np.testing.assert_array_equal(grid.log_weight_signs(signs),
                                  bits.log_weight_signs(signs))


def test_curie_weiss_depends_only_on_magnetization():
    model = CurieWeiss(0.8, 1.5, 6)
    rng = np.random.default_rng(1)
    x = rng.choice([-1.0, 1.0], size=6)
    base = model.log_weight_signs(x)
    for _ in range(10):
        perm = rng.permutation(6)
        assert model.log_weight_signs(x[perm]) == pytest.approx(base, abs=1e-12)


@pytest.mark.parametrize("model", ALL_SMALL_MODELS)
def test_batch_log_weight_matches_scalar(model):
    rng = np.random.default_rng(7)
    ks = rng.integers(0, 1 << model.dim, size=20)
    batch = model.log_weight_signs(all_signs(model.dim).astype(float)[ks])
    for j, k in enumerate(ks):
        assert batch[j] == pytest.approx(model.log_weight(state_of(int(k), model.dim)),
                                         abs=1e-12)


def test_log_weight_finite_everywhere():
    # strict positivity of every model, including the steep mean-field case
    model = CurieWeiss(1.0, 0.0, 9)
    lw = model.log_weight_signs(all_signs(9).astype(float))
    assert np.isfinite(lw).all()
    assert np.isfinite(exact_target(model)).all()


def test_dimension_mismatch_and_cap():
    model = IndependentBits(0.5, 3)
    with pytest.raises(ValueError):
        model.log_weight(state_of(0, 4))
    with pytest.raises(CapabilityError):
        exact_target(IndependentBits(0.1, 31))
