#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "biphoton/constants.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/jsa.hpp"
#include "test_support.hpp"

using namespace biphoton;
using namespace biphoton::testsupport;

TEST_CASE("schmidt purity matches the gaussian closed form") {
    // widths sit well inside the +-7.5e12 rad/s grid so truncation stays
    // below the 1e-6 gate
    const auto grid = build_grid(1582.0, 20.0, 256);
    const double unit = 0.55e12;
    for (double ratio : {1.0, 1.7, 2.4, 3.0, 0.4}) {
        const double sp = unit * ratio, sm = unit;
        const auto rep = schmidt_decompose(gaussian_jsa(grid, sp, sm), grid.step * grid.step);
        CHECK(rep.purity == doctest::Approx(gaussian_purity_oracle(sp, sm)).epsilon(1e-6));
    }
}

TEST_CASE("schmidt spectrum properties") {
    const auto grid = build_grid(1582.0, 20.0, 128);
    const auto rep = schmidt_decompose(gaussian_jsa(grid, 2e12, 0.7e12), grid.step * grid.step);
    double sum = 0;
    for (size_t i = 0; i < rep.lambda.size(); ++i) {
        CHECK(rep.lambda[i] >= 0);
        if (i) CHECK(rep.lambda[i] <= rep.lambda[i - 1] + 1e-15);
        sum += rep.lambda[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.purity > 0);
    CHECK(rep.purity <= 1.0 + 1e-12);
    CHECK(rep.schmidt_number == doctest::Approx(1.0 / rep.purity).epsilon(1e-12));

    CHECK_THROWS_AS(schmidt_decompose(Eigen::MatrixXcd::Zero(8, 8), 1.0),
                    std::invalid_argument);
}

TEST_CASE("purity from intensity is a flagged upper bound") {
    const auto grid = build_grid(1582.0, 20.0, 128);
    const auto f = gaussian_jsa(grid, 2e12, 0.7e12);
    const auto amp = schmidt_decompose(f, grid.step * grid.step);
    const auto inten = purity_from_jsi(f.cwiseAbs2(), grid.step * grid.step);
    CHECK(inten.upper_bound);
    CHECK_FALSE(amp.upper_bound);
    // a phase-free amplitude loses nothing under |.|^2 then sqrt
    CHECK(inten.purity == doctest::Approx(amp.purity).epsilon(1e-9));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(8, 8, -1.0);
    CHECK_THROWS_AS(purity_from_jsi(bad, 1.0), std::invalid_argument);
}

TEST_CASE("model jsa invariants at 0.95 nm pump") {
    const auto j = model_jsa(0.95);
    CHECK(j.notes.empty());

    // normalization: sum |f|^2 step^2 = 1
    CHECK(j.f.squaredNorm() * j.grid.step * j.grid.step ==
          doctest::Approx(1.0).epsilon(1e-12));

    // exchange symmetry to machine precision (symmetric design, eps = 0)
    const double asym = (j.f - j.f.transpose()).norm() / j.f.norm();
    CHECK(asym < 1e-9);
}

TEST_CASE("model purity versus pump bandwidth (frozen values)") {
    // model values at N = 512, span 20 nm, 2.2 nm DFG calibration
    struct Row {
        double pump_nm, purity;
    };
    const Row rows[] = {{5.6, 0.400}, {3.6, 0.545}, {2.4, 0.738},
                        {1.6, 0.920}, {0.95, 0.993}, {0.74, 0.936}};
    for (const auto& r : rows) {
        const auto j = model_jsa(r.pump_nm);
        const auto rep = schmidt_decompose(j.f, j.grid.step * j.grid.step);
        CHECK_MESSAGE(rep.purity == doctest::Approx(r.purity).epsilon(0.02),
                      "pump ", r.pump_nm, " nm");
    }
}

TEST_CASE("purity is grid-converged at N = 512") {
    for (double pump : {5.6, 2.4, 0.95}) {
        const auto a = model_jsa(pump, 256);
        const auto b = model_jsa(pump, 512);
        const double pa = schmidt_decompose(a.f, a.grid.step * a.grid.step).purity;
        const double pb = schmidt_decompose(b.f, b.grid.step * b.grid.step).purity;
        CHECK(std::abs(pa - pb) < 0.01);
    }
}

TEST_CASE("delta = 0 limit: f depends on the sum frequency only") {
    const auto grid = build_grid(1582.0, 20.0, 96);
    PumpSpectrum pump;
    pump.center_nm = 791.0;
    pump.fwhm_nm = 2.0;
    const auto poling = uniform_poling(46.1, 18.0);
    const auto j = build_jsa(grid, pump, poling, DispersionModel{0.0, 0.0});
    // constant along antidiagonals: f(i, j) == f(i+1, j-1)
    for (int i = 0; i + 1 < 96; ++i)
        for (int j2 = 1; j2 < 96; j2 += 17)
            CHECK(std::abs(j.f(i, j2) - j.f(i + 1, j2 - 1)) < 1e-12 * j.f.cwiseAbs().maxCoeff());
}

TEST_CASE("eps != 0 general path agrees with the fast path in the limit") {
    const auto& c = calibrated();
    const auto grid = build_grid(1582.0, 20.0, 96);
    PumpSpectrum pump;
    pump.center_nm = 791.0;
    pump.fwhm_nm = 2.4;
    // uniform design: no symmetry projection on either path
    const auto a = build_jsa(grid, pump, c.uniform, DispersionModel{c.model.delta, 0.0});
    const auto b =
        build_jsa(grid, pump, c.uniform, DispersionModel{c.model.delta, c.model.delta * 1e-12});
    CHECK((a.f - b.f).norm() / a.f.norm() < 1e-8);

    // a real common-mode term breaks the exchange symmetry
    const auto d =
        build_jsa(grid, pump, c.apodized, DispersionModel{c.model.delta, 0.3 * c.model.delta});
    CHECK((d.f - d.f.transpose()).norm() / d.f.norm() > 1e-3);
}

TEST_CASE("marginals of the model state") {
    {
        const auto j = model_jsa(0.95);
        const auto mg = marginals(j);
        CHECK_FALSE(mg.fit_fallback);
        CHECK(mg.signal_fwhm_nm == doctest::Approx(mg.idler_fwhm_nm).epsilon(1e-6));
        CHECK(mg.signal_fwhm_nm > 2.3);
        CHECK(mg.signal_fwhm_nm < 3.3);
        // density normalization: sum marginal * step = 1
        double total = 0;
        for (double v : mg.signal) total += v * j.grid.step;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        const auto j = model_jsa(5.6, 512, 32.0);
        const auto mg = marginals(j);
        CHECK(mg.signal_fwhm_nm > 9.5);
        CHECK(mg.signal_fwhm_nm < 12.5);
    }
}

TEST_CASE("side lobe suppression: apodized passes, uniform fails") {
    const auto ja = model_jsa(0.95, 512, 16.0);
    const double apod_db = side_lobe_suppression_db(ja.grid, jsi(ja));
    CHECK(apod_db >= 24.0);
    CHECK(apod_db < 60.0);

    const auto& c = calibrated();
    PumpSpectrum pump;
    pump.center_nm = 791.0;
    pump.fwhm_nm = 0.95;
    const auto ju = build_jsa(ja.grid, pump, c.uniform, c.model);
    const double unif_db = side_lobe_suppression_db(ju.grid, jsi(ju));
    CHECK(unif_db > 11.0);
    CHECK(unif_db < 15.0);
}

TEST_CASE("side lobe floor on a pure gaussian and lobe-free sentinel") {
    // a pure Gaussian has no lobes: the metric bottoms out on the main-lobe
    // tail at the 1.5 FWHM ellipse boundary, 4 ln2 * 1.5^2 / ln10 * 10 dB
    const auto grid = build_grid(1582.0, 20.0, 128);
    const auto f = gaussian_jsa(grid, 1.1e12, 0.55e12);
    const double db = side_lobe_suppression_db(grid, f.cwiseAbs2());
    CHECK(db == doctest::Approx(10.0 * std::log10(std::exp(4.0 * kLn2 * 2.25)))
                    .epsilon(0.03));  // ~27.1 dB

    // compactly supported blob: nothing outside the ellipse at all
    Eigen::MatrixXd blob = Eigen::MatrixXd::Zero(128, 128);
    for (int i = 62; i < 66; ++i)
        for (int j = 62; j < 66; ++j)
            blob(i, j) = std::exp(-0.5 * ((i - 63.5) * (i - 63.5) + (j - 63.5) * (j - 63.5)));
    CHECK(std::isinf(side_lobe_suppression_db(grid, blob)));
}

TEST_CASE("grid coverage warning") {
    const auto& c = calibrated();
    const auto grid = build_grid(1582.0, 3.0, 96);  // far too narrow for a 5.6 nm pump
    PumpSpectrum pump;
    pump.center_nm = 791.0;
    pump.fwhm_nm = 5.6;
    const auto j = build_jsa(grid, pump, c.apodized, c.model);
    CHECK_FALSE(j.notes.empty());
}

TEST_CASE("bandpass filtering") {
    const auto j = model_jsa(5.6);
    const double p0 = schmidt_decompose(j.f, j.grid.step * j.grid.step).purity;
    const auto filtered = apply_bandpass(j, j.grid.center_nm, 6.6, FilterShape::gaussian);
    const double p1 =
        schmidt_decompose(filtered.f, filtered.grid.step * filtered.grid.step).purity;
    CHECK(p1 > p0);  // trimming spectral wings removes correlated modes
    CHECK(filtered.f.squaredNorm() * j.grid.step * j.grid.step ==
          doctest::Approx(1.0).epsilon(1e-12));

    const auto wide = apply_bandpass(j, j.grid.center_nm, 500.0, FilterShape::rectangular);
    CHECK((wide.f - j.f).norm() / j.f.norm() < 1e-12);
    CHECK_THROWS_AS(apply_bandpass(j, j.grid.center_nm, -1.0, FilterShape::gaussian), std::invalid_argument);
}
