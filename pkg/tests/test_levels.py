
import numpy as np
import pytest

from dwis import (
    ContourLevels,
    LevelScheme,
    Pdf1D,
    build_field,
    estimate_pdf,
    eval_field_grid,
    lloydmax_levels,
    make_levels,
    true_pdf,
    uniform_levels,
)
from dwis.field import GridSpec
from dwis.levels import levels_to_csv, pdf_to_csv, quantizer_distortion
from oracles import brute_force_quantizer

SQRT_2_OVER_PI = 0.7978845608028654


def uniform_pdf(lo=0.0, hi=1.0, bins=16):
    edges = np.linspace(lo, hi, bins + 1)
    dens = np.full(bins, 1.0 / (hi - lo))
    return Pdf1D(bin_edges=edges, densities=dens)


def normal_pdf(lo=-6.0, hi=6.0, bins=4096):
    """Finely discretized standard normal, normalized over the support."""
    edges = np.linspace(lo, hi, bins + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    dens = np.exp(-0.5 * mids**2)
    dens /= np.sum(dens * np.diff(edges))
    return Pdf1D(bin_edges=edges, densities=dens)


class TestUniformLevels:
    def test_two_midpoints(self):
        np.testing.assert_allclose(uniform_levels((0, 1), 2), [0.25, 0.75], rtol=1e-15)

    def test_single_midpoint(self):
        np.testing.assert_allclose(uniform_levels((0, 1), 1), [0.5], rtol=1e-15)

    def test_hand_evaluated_four(self):
        np.testing.assert_allclose(uniform_levels((-3, 5), 4), [-2.0, 0.0, 2.0, 4.0], atol=1e-14)

    def test_rejects_degenerate_range(self):
        with pytest.raises(ValueError):
            uniform_levels((1.0, 1.0), 2)


class TestLloydMax:
    @pytest.mark.parametrize("m", [1, 2, 4, 8])
    def test_uniform_pdf_fixed_point(self, m):
        result = lloydmax_levels(uniform_pdf(), m)
        np.testing.assert_allclose(result.levels, uniform_levels((0, 1), m), atol=1e-9)

    def test_uniform_pdf_boundary(self):
        result = lloydmax_levels(uniform_pdf(), 2)
        assert result.boundaries[1] == pytest.approx(0.5, abs=1e-9)

    def test_normal_two_levels_analytic(self):
        # centroid of each half of a symmetric normal: +-sqrt(2/pi)
        result = lloydmax_levels(normal_pdf(), 2)
        np.testing.assert_allclose(result.levels, [-SQRT_2_OVER_PI, SQRT_2_OVER_PI], atol=1e-4)

    def test_single_level_is_mean(self):
        edges = np.array([0.0, 1.0, 3.0])
        dens = np.array([0.5, 0.25])  # integrates to 1, mean = 0.5*0.25 + 0.5*2 = 1.125
        pdf = Pdf1D(bin_edges=edges, densities=dens)
        result = lloydmax_levels(pdf, 1)
        mean = 0.5 * (1.0 * 0.5) / 1 + 0.25 * (3.0**2 - 1.0) / 2
        assert result.levels[0] == pytest.approx(mean, rel=1e-12)

    def test_distortion_non_increasing(self):
        f = build_field(20, 20, 3.0, 10.0, seed=2)
        pdf = true_pdf(f, GridSpec(0, 100, 0, 100, nx=40, ny=40), bins=32)
        result = lloydmax_levels(pdf, 6)
        hist = np.array(result.distortion_history)
        assert (np.diff(hist) <= 1e-12).all()

    def test_levels_strictly_increasing_inside_support(self):
        f = build_field(20, 20, 3.0, 10.0, seed=3)
        pdf = true_pdf(f, GridSpec(0, 100, 0, 100, nx=40, ny=40), bins=32)
        for m in (1, 3, 7, 12):
            lv = lloydmax_levels(pdf, m).levels
            assert (np.diff(lv) > 0).all()
            lo, hi = pdf.support
            assert lv[0] > lo and lv[-1] < hi

    def test_symmetric_pdf_gives_symmetric_levels(self):
        result = lloydmax_levels(normal_pdf(bins=512), 5)
        np.testing.assert_allclose(result.levels, -result.levels[::-1], atol=1e-6)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_matches_brute_force_on_triangle_pdf(self, m):
        # triangular density f(x) = 2x on (0, 1), discretized coarse
        edges = np.linspace(0, 1, 33)
        mids = 0.5 * (edges[:-1] + edges[1:])
        dens = 2 * mids / np.sum(2 * mids * np.diff(edges))
        pdf = Pdf1D(bin_edges=edges, densities=dens)
        result = lloydmax_levels(pdf, m)
        bf_levels, bf_dist = brute_force_quantizer(pdf, m, resolution=0.01)
        np.testing.assert_allclose(result.levels, bf_levels, atol=0.011)
        assert result.distortion <= bf_dist + 1e-9

    def test_empty_mass_cells_survive(self):
        # all mass in the outer bins; interior cells fall back to midpoints
        edges = np.linspace(0, 10, 11)
        dens = np.zeros(10)
        dens[0] = dens[-1] = 0.5
        pdf = Pdf1D(bin_edges=edges, densities=dens)
        result = lloydmax_levels(pdf, 4)
        assert np.isfinite(result.levels).all()
        assert (np.diff(result.levels) > 0).all()

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            lloydmax_levels(uniform_pdf(), 0)
        with pytest.raises(ValueError):
            lloydmax_levels(uniform_pdf(), 2, tol=0.0)


class TestEstimatePdf:
    def test_two_value_hand_count(self):
        pdf = estimate_pdf([0.0, 1.0], bins=2)
        np.testing.assert_allclose(pdf.bin_edges, [0.0, 0.5, 1.0], atol=1e-15)
        np.testing.assert_allclose(pdf.densities, [1.0, 1.0], rtol=1e-9)

    def test_uniform_sampling_statistics(self):
        v = np.random.default_rng(0).uniform(0, 1, 1_000_000)
        pdf = estimate_pdf(v, bins=10)
        np.testing.assert_allclose(pdf.densities, 1.0, atol=0.02)

    @pytest.mark.parametrize("seed", range(5))
    def test_always_integrates_to_one(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=rng.integers(2, 500)) * rng.uniform(0.1, 50)
        if v.min() == v.max():
            v = np.array([0.0, 1.0])
        pdf = estimate_pdf(v, bins=int(rng.integers(1, 80)))
        total = np.sum(pdf.densities * np.diff(pdf.bin_edges))
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_rejects_degenerate_support(self):
        with pytest.raises(ValueError):
            estimate_pdf([3.0, 3.0, 3.0])
        with pytest.raises(ValueError):
            estimate_pdf([1.0])


class TestTruePdf:
    def test_agrees_with_estimate_on_grid_values(self):
        f = build_field(5, 5, 3.0, 10.0, seed=1)
        grid = GridSpec(0, 100, 0, 100, nx=25, ny=25)
        a = true_pdf(f, grid, bins=16)
        b = estimate_pdf(eval_field_grid(f, grid).ravel(), bins=16)
        np.testing.assert_array_equal(a.bin_edges, b.bin_edges)
        np.testing.assert_array_equal(a.densities, b.densities)

    def test_standard_field_positive_support(self):
        f = build_field(150, 150, 3.0, 10.0, seed=1)
        pdf = true_pdf(f, GridSpec(0, 100, 0, 100), bins=64)
        lo, hi = pdf.support
        assert hi > lo > 0


class TestMakeLevels:
    def test_u_sg_ignores_pdf_source(self):
        a = make_levels(LevelScheme.U_SG, (0, 10), 4, 0.2)
        b = make_levels(LevelScheme.U_SG, (0, 10), 4, 0.2, pdf_source=np.arange(50.0))
        assert a.levels == b.levels

    def test_lm_fix_uniform_pdf_equals_u_sg(self):
        u = make_levels(LevelScheme.U_SG, (0, 1), 4, 0.2)
        lm = make_levels(LevelScheme.LM_FIX, (0, 1), 4, 0.2, pdf_source=uniform_pdf())
        np.testing.assert_allclose(lm.levels, u.levels, atol=1e-8)

    def test_lm_sg_concentrates_where_mass_is(self):
        # smooth skewed sample: exponential decay, most mass near 0
        rng = np.random.default_rng(0)
        values = rng.exponential(1.5, 20000)
        values = values[values < 10]
        lm = make_levels(LevelScheme.LM_SG, (0, 10), 8, 0.2, pdf_source=values)
        gaps = np.diff(lm.levels)
        # gaps in the dense low region are smaller than in the sparse tail
        assert gaps[0] < gaps[-1] / 2
        assert (np.diff(gaps) > 0).all()  # gap grows as density falls

    def test_degenerate_range_falls_back_to_single_level(self):
        lv = make_levels(LevelScheme.U_SG, (5.0, 5.0), 4, 0.2)
        assert lv.levels == (5.0,)
        lv = make_levels(LevelScheme.LM_SG, (2.0, 4.0), 4, 0.2, pdf_source=np.full(10, 3.0))
        assert lv.levels == (3.0,)

    def test_scheme_and_delta_recorded(self):
        lv = make_levels(LevelScheme.U_SG, (0, 1), 3, 0.07)
        assert lv.scheme is LevelScheme.U_SG
        assert lv.delta == 0.07

    def test_bin_count_reaches_the_estimator(self):
        values = np.random.default_rng(3).exponential(1.0, 5000)
        coarse = make_levels(LevelScheme.LM_SG, (0, 8), 5, 0.1, pdf_source=values, bins=4)
        fine = make_levels(LevelScheme.LM_SG, (0, 8), 5, 0.1, pdf_source=values, bins=256)
        assert coarse.levels != fine.levels


class TestContourLevelsType:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            ContourLevels(levels=(1.0, 0.5), delta=0.1, scheme=LevelScheme.U_SG, range=(0, 2))

    def test_rejects_levels_outside_range(self):
        with pytest.raises(ValueError):
            ContourLevels(levels=(3.0,), delta=0.1, scheme=LevelScheme.U_SG, range=(0, 2))

    def test_rejects_nonpositive_delta(self):
        with pytest.raises(ValueError):
            ContourLevels(levels=(1.0,), delta=0.0, scheme=LevelScheme.U_SG, range=(0, 2))


class TestPdfType:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            Pdf1D(bin_edges=np.array([0.0, 1.0]), densities=np.array([2.0]))

    def test_rejects_negative_density(self):
        with pytest.raises(ValueError):
            Pdf1D(bin_edges=np.array([0.0, 0.5, 1.0]), densities=np.array([3.0, -1.0]))


def test_csv_exports():
    lv = make_levels(LevelScheme.U_SG, (0, 1), 2, 0.1)
    assert levels_to_csv(lv).splitlines()[0] == "index,level"
    assert levels_to_csv(lv).splitlines()[1] == "0,0.25"
    pdf = uniform_pdf(bins=2)
    lines = pdf_to_csv(pdf).splitlines()
    assert lines[0] == "bin_lo,bin_hi,density"
    assert lines[1] == "0.0,0.5,1.0"


def test_quantizer_distortion_uniform_closed_form():
    # m uniform levels on uniform pdf: distortion = (1/m)^2 / 12
    for m in (1, 2, 4):
        d = quantizer_distortion(uniform_pdf(), uniform_levels((0, 1), m))
        assert d == pytest.approx(1.0 / (12 * m * m), rel=1e-9)
