import numpy as np
import pytest

from granex.histogram import DegenerateInputError, agitation_energies, histogram
from granex.pointsys import ParticleCloud, affine_fit, random_cloud


def test_two_equal_masses():
    h = histogram([0.5, 1.5], delta=1.0)
    np.testing.assert_allclose(h.values, [0.5, 0.5])
    assert h.mass == 1.0
    assert h.first_moment == pytest.approx(1.0)
    assert h.top_bin == 2


def test_identical_energies():
    h = histogram(np.full(10, 3.7), delta=0.5)
    assert np.count_nonzero(h.counts) == 1
    assert h.xi[0] == pytest.approx(1.0)
    assert h.edges()[h.top_bin - 1] <= h.xi[0] < h.edges()[h.top_bin]
    assert h.top_bin - 1 <= 2


def test_canonical_sample():
    rng = np.random.default_rng(12345)
    h = histogram(rng.exponential(size=100_000), delta=0.1)
    mid = h.edges()[:-1] + 0.05
    # compare the bar heights with the bin averages of exp(-xi)
    avg = (np.exp(-h.edges()[:-1]) - np.exp(-h.edges()[1:])) / 0.1
    assert np.max(np.abs(h.values - avg)) < 0.02
    assert np.max(np.abs(h.values - np.exp(-mid))) < 0.02


def test_degenerate_inputs():
    with pytest.raises(DegenerateInputError):
        histogram(np.zeros(4))
    with pytest.raises(ValueError):
        histogram([1.0], delta=0.0)
    with pytest.raises(ValueError):
        histogram([1.0, -1.0])
    with pytest.raises(ValueError):
        histogram([1.0, 2.0], masses=[1.0])
    # exactly affine motion carries no agitation
    x = np.random.default_rng(0).standard_normal((6, 3))
    with pytest.raises(DegenerateInputError):
        histogram(ParticleCloud(np.ones(6), x, 0.3 * x), 0.1)


def test_agitation_energies_sum(rng):
    c = random_cloud(rng, 30)
    e = agitation_energies(c)
    assert e.sum() / c.total_mass == pytest.approx(affine_fit(c).energy.agitation, rel=1e-12)


def test_mass_weighting():
    h = histogram([0.0, 3.0], delta=1.0, masses=[2.0, 1.0])
    # mean specific energy = 1, so xi = (0, 3) with mass fractions (2/3, 1/3)
    np.testing.assert_allclose(h.values, [2 / 3, 0, 0, 1 / 3])
    # bin midpoints 0.5 and 3.5
    assert h.first_moment == pytest.approx(0.5 * 2 / 3 + 3.5 / 3, abs=1e-12)


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.5])
def test_invariants_random_clouds(delta):
    rng = np.random.default_rng(int(delta * 1000))
    for _ in range(50):
        # four or fewer points move exactly affinely and carry no agitation
        c = random_cloud(rng, int(rng.integers(5, 300)))
        h = histogram(c, delta)
        assert abs(h.mass - 1.0) < 1e-12
        assert 1 - delta / 2 - 1e-12 <= h.first_moment <= 1 + delta / 2 + 1e-12
        # bound on bins of energy share (fraction delta of the total per bin)
        assert h.share_top_bin - 1 <= 1 / delta
        # the same argument on xi-bins bounds the top bin by its mass fraction
        assert (h.top_bin - 1) * delta * h.top_mass_fraction <= 1 + 1e-12


def test_literal_xi_bin_bound_can_fail():
    # one particle carrying most of the agitation sits far beyond xi = 1 + delta
    h = histogram([0.0] * 9 + [1.0], delta=0.1)
    assert h.top_bin - 1 > 1 / 0.1
    assert h.share_top_bin - 1 <= 1 / 0.1
