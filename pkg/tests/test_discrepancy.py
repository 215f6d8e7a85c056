import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wassdisc.discrepancy import (
    box_mass_supremum,
    build_critical_grid,
    ks_distance_1d,
    star_discrepancy,
    uniform_discrepancy,
)
from wassdisc.errors import DimensionMismatchError, DomainError, GridTooLargeError
from wassdisc.measures import (
    DiscreteMeasure,
    Domain,
    UniformCube,
    iid_uniform,
    midpoint_grid,
)


def brute_star_vs_uniform_1d(m, resolution=200_001):
    """Dense scan of |F_emp(x) - x| including the limits at jump points."""
    xs = np.sort(m.points[:, 0])
    grid = np.unique(np.concatenate([np.linspace(0, 1, resolution), xs]))
    order = np.argsort(m.points[:, 0], kind="stable")
    pts = m.points[order, 0]
    cum = np.concatenate([[0.0], np.cumsum(m.weights[order])])
    closed = cum[np.searchsorted(pts, grid, side="right")]
    strict = cum[np.searchsorted(pts, grid, side="left")]
    return max(np.abs(closed - grid).max(), np.abs(strict - grid).max())


def brute_box_scan_vs_uniform(m, per_axis=60):
    """Exhaustive closed-box scan over corner pairs from a dense grid.

    Understates the true supremum by O(1/per_axis); used as a lower
    witness plus approximate match.
    """
    d = m.dim
    axes = np.unique(np.concatenate([np.linspace(0, 1, per_axis),
                                     *[m.points[:, i] for i in range(d)]]))
    best = 0.0
    if d == 1:
        a = axes[:, None]
        b = axes[None, :]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        cnt = ((m.points[:, 0][:, None, None] >= lo) &
               (m.points[:, 0][:, None, None] <= hi))
        mass = (cnt * m.weights[:, None, None]).sum(axis=0)
        return np.abs(mass - (hi - lo)).max()
    for i0 in range(len(axes)):
        for j0 in range(i0, len(axes)):
            inside0 = (m.points[:, 0] >= axes[i0]) & (m.points[:, 0] <= axes[j0])
            w0 = axes[j0] - axes[i0]
            for i1 in range(len(axes)):
                for j1 in range(i1, len(axes)):
                    inside = inside0 & (m.points[:, 1] >= axes[i1]) & (m.points[:, 1] <= axes[j1])
                    mass = m.weights[inside].sum()
                    best = max(best, abs(mass - w0 * (axes[j1] - axes[i1])))
    return best


def random_pair(rng, n, m, d, domain=Domain.UNIT_CUBE):
    span = rng.random if domain is Domain.UNIT_CUBE else (lambda s: rng.normal(size=s))
    mu = DiscreteMeasure(span((n, d)), rng.dirichlet(np.ones(n)), domain)
    nu = DiscreteMeasure(span((m, d)), rng.dirichlet(np.ones(m)), domain)
    return mu, nu


class TestStarDiscrepancy:
    @pytest.mark.parametrize("n", [1, 2, 5, 10, 100])
    def test_midpoint_grid_identity(self, n):
        assert star_discrepancy(midpoint_grid(n), UniformCube(1)) == pytest.approx(
            1 / (2 * n), abs=1e-15)

    def test_identical_measures(self):
        m = iid_uniform(20, 2, 3)
        assert star_discrepancy(m, m) == 0.0

    def test_atom_at_one_vs_uniform(self):
        # oracle: dense scan with x -> 1^- gives sup |F - x| = 1
        m = DiscreteMeasure([[1.0]], [1.0])
        assert star_discrepancy(m, UniformCube(1)) == 1.0
        assert brute_star_vs_uniform_1d(m) == pytest.approx(1.0, abs=1e-4)

    def test_atom_at_zero_is_counted(self):
        m = DiscreteMeasure([[0.0]], [1.0])
        assert star_discrepancy(m, UniformCube(1)) == 1.0

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_dense_scan_1d(self, seed):
        m = iid_uniform(13, 1, seed)
        exact = star_discrepancy(m, UniformCube(1))
        brute = brute_star_vs_uniform_1d(m)
        assert exact >= brute - 1e-12
        assert exact == pytest.approx(brute, abs=1e-4)

    def test_matches_corner_scan_2d(self):
        rng = np.random.default_rng(5)
        pts = rng.random((7, 2))
        m = DiscreteMeasure(pts, np.full(7, 1 / 7))
        g = np.linspace(0, 1, 301)
        X, Y = np.meshgrid(g, g, indexing="ij")
        closed = ((pts[:, 0][:, None, None] <= X) & (pts[:, 1][:, None, None] <= Y)).mean(axis=0)
        brute = np.abs(closed - X * Y).max()
        exact = star_discrepancy(m, UniformCube(2))
        assert exact >= brute - 1e-12
        assert exact == pytest.approx(brute, abs=0.02)

    def test_discrete_pair_known_value(self):
        mu = DiscreteMeasure([[0.5]], [1.0])
        nu = DiscreteMeasure([[0.3]], [1.0])
        assert star_discrepancy(mu, nu) == 1.0

    def test_real_space_pair(self):
        rng = np.random.default_rng(11)
        mu, nu = random_pair(rng, 9, 6, 2, Domain.REAL_SPACE)
        ds = star_discrepancy(mu, nu)
        assert 0.0 <= ds <= 1.0
        assert ds == star_discrepancy(nu, mu)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            star_discrepancy(midpoint_grid(2), UniformCube(2))

    def test_uniform_needs_cube_domain(self):
        m = DiscreteMeasure([[0.5]], [1.0], Domain.REAL_SPACE)
        with pytest.raises(DomainError):
            star_discrepancy(m, UniformCube(1))

    def test_grid_cap_is_an_error(self):
        m = iid_uniform(40, 2, 0)
        with pytest.raises(GridTooLargeError):
            star_discrepancy(m, UniformCube(2), grid_cap=100)


class TestUniformDiscrepancy:
    def test_weak_convergence_counterexample(self):
        # two atoms merging to one: both discrepancies stick at 1/2
        for n in (1, 2, 3, 10, 100):
            nu_n = DiscreteMeasure([[0.5], [0.5 * (1 + 1 / n)]], [0.5, 0.5])
            nu = DiscreteMeasure([[0.5]], [1.0])
            assert star_discrepancy(nu_n, nu) == 0.5
            assert uniform_discrepancy(nu_n, nu) == 0.5

    def test_identical_measures(self):
        m = iid_uniform(14, 2, 9)
        assert uniform_discrepancy(m, m) == 0.0

    def test_midpoint_two_points(self):
        # oracle: exhaustive box scan; the widest empty open box and the
        # tight box around both atoms each give exactly 1/2
        m = midpoint_grid(2)
        exact = uniform_discrepancy(m, UniformCube(1))
        assert exact == 0.5
        assert brute_box_scan_vs_uniform(m, per_axis=2001) == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_box_scan_1d(self, seed):
        m = iid_uniform(9, 1, seed)
        exact = uniform_discrepancy(m, UniformCube(1))
        brute = brute_box_scan_vs_uniform(m, per_axis=2001)
        assert exact >= brute - 1e-12
        assert exact == pytest.approx(brute, abs=2e-3)

    @pytest.mark.parametrize("seed", range(2))
    def test_matches_box_scan_2d(self, seed):
        m = iid_uniform(5, 2, seed)
        exact = uniform_discrepancy(m, UniformCube(2))
        brute = brute_box_scan_vs_uniform(m, per_axis=18)
        assert exact >= brute - 1e-12
        assert exact == pytest.approx(brute, abs=0.12)

    def test_discrete_pair_matches_exhaustive_runs(self):
        rng = np.random.default_rng(2)
        mu, nu = random_pair(rng, 5, 4, 2)
        axes = [np.unique(np.concatenate([mu.points[:, i], nu.points[:, i]])) for i in range(2)]

        def mass(m, lo, hi):
            inside = np.all((m.points >= lo) & (m.points <= hi), axis=1)
            return m.weights[inside].sum()

        best = 0.0
        for i0 in range(len(axes[0])):
            for j0 in range(i0, len(axes[0])):
                for i1 in range(len(axes[1])):
                    for j1 in range(i1, len(axes[1])):
                        lo = np.array([axes[0][i0], axes[1][i1]])
                        hi = np.array([axes[0][j0], axes[1][j1]])
                        best = max(best, abs(mass(mu, lo, hi) - mass(nu, lo, hi)))
        assert uniform_discrepancy(mu, nu) == pytest.approx(best, abs=1e-12)

    def test_pair_cap_is_an_error(self):
        m = iid_uniform(30, 2, 0)
        with pytest.raises(GridTooLargeError):
            uniform_discrepancy(m, UniformCube(2), pair_cap=1000)

    @pytest.mark.parametrize("seed,n,d", [(0, 12, 1), (1, 8, 2), (2, 6, 3)])
    def test_symmetry_and_sandwich(self, seed, n, d):
        rng = np.random.default_rng(seed)
        mu, nu = random_pair(rng, n, max(2, n - 3), d)
        ds = star_discrepancy(mu, nu)
        di = uniform_discrepancy(mu, nu)
        assert ds == star_discrepancy(nu, mu)
        assert di == uniform_discrepancy(nu, mu)
        assert ds <= di + 1e-12
        assert di <= 2 ** d * ds + 1e-12
        assert 0.0 <= ds <= 1.0 and 0.0 <= di <= 1.0

    @given(st.integers(0, 10_000), st.integers(1, 7), st.integers(1, 7))
    @settings(max_examples=30, deadline=None)
    def test_sandwich_property_1d(self, seed, n, m):
        rng = np.random.default_rng(seed)
        mu, nu = random_pair(rng, n, m, 1)
        ds = star_discrepancy(mu, nu)
        di = uniform_discrepancy(mu, nu)
        assert ds <= di + 1e-12 <= 2 * ds + 2e-12


class TestBoxConventions:
    """Closed and semi-open box families give the same supremum for
    measures supported in the open-at-zero cube."""

    @pytest.mark.parametrize("seed,d", [(0, 1), (1, 1), (2, 2), (3, 2)])
    def test_closed_equals_semiopen(self, seed, d):
        rng = np.random.default_rng(seed)
        pts_mu = 0.05 + 0.95 * rng.random((8, d))
        pts_nu = 0.05 + 0.95 * rng.random((5, d))
        mu = DiscreteMeasure(pts_mu, rng.dirichlet(np.ones(8)))
        nu = DiscreteMeasure(pts_nu, rng.dirichlet(np.ones(5)))
        closed = box_mass_supremum(mu, nu, lower_closed=True)
        semiopen = box_mass_supremum(mu, nu, lower_closed=False)
        assert closed == pytest.approx(semiopen, abs=1e-12)
        assert closed == pytest.approx(uniform_discrepancy(mu, nu), abs=1e-12)


class TestKs1d:
    @pytest.mark.parametrize("n", [1, 3, 10, 100])
    def test_agrees_with_star(self, n):
        m = midpoint_grid(n)
        assert abs(ks_distance_1d(m, UniformCube(1)) -
                   star_discrepancy(m, UniformCube(1))) <= 1e-14

    def test_point_mass_zero_distance(self):
        m = DiscreteMeasure([[0.0]], [1.0])
        assert ks_distance_1d(m, m) == 0.0

    def test_two_points_vs_uniform_matches_scan(self):
        m = DiscreteMeasure([[0.2], [0.8]], [0.5, 0.5])
        assert ks_distance_1d(m, UniformCube(1)) == pytest.approx(
            brute_star_vs_uniform_1d(m), abs=1e-4)
        assert ks_distance_1d(m, UniformCube(1)) == pytest.approx(0.3, abs=1e-15)

    @pytest.mark.parametrize("seed", range(8))
    def test_agrees_with_star_on_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        mu, nu = random_pair(rng, 11, 7, 1, Domain.REAL_SPACE)
        assert abs(ks_distance_1d(mu, nu) - star_discrepancy(mu, nu)) <= 1e-14

    def test_needs_dim_one(self):
        with pytest.raises(DimensionMismatchError):
            ks_distance_1d(iid_uniform(4, 2, 0), UniformCube(2))


class TestCriticalGrid:
    def test_axes_strictly_increasing(self):
        g = build_critical_grid([midpoint_grid(4)], 1, extra=(1.0,))
        assert np.all(np.diff(g.axes[0]) > 0)
        assert g.size == 5

    def test_cap_enforced(self):
        with pytest.raises(GridTooLargeError):
            build_critical_grid([iid_uniform(100, 2, 0)], 2, cap=50)
