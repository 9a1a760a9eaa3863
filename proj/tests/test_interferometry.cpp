#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/interferometry.hpp"
#include "test_support.hpp"

using namespace biphoton;
using namespace biphoton::testsupport;

namespace {

// Direct double sum over the grid: P(tau) = 1/2 (1 - Re sum f(s,i) f*(i,s) e^{i(nu_i-nu_s)tau})
double hom_probability_oracle(const JointSpectralAmplitude& j, double tau_ps) {
    const double tau = tau_ps * 1e-12;
    const double w = j.grid.step * j.grid.step;
    const int n = j.grid.points;
    std::complex<double> acc = 0;
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i) {
            const double phase = (j.grid.detuning[i] - j.grid.detuning[s]) * tau;
            acc += j.f(s, i) * std::conj(j.f(i, s)) * w *
                   std::complex<double>(std::cos(phase), std::sin(phase));
        }
    return 0.5 * (1.0 - acc.real());
}

}  // namespace

TEST_CASE("hom scan matches the direct sum and dips to zero") {
    const auto j = model_jsa(5.6, 256);
    const auto scan = hom_scan(j, 12.0, 241);

    // symmetric amplitude: complete interference at zero delay
    const int mid = 120;
    CHECK(scan.delay_ps[mid] == doctest::Approx(0.0));
    CHECK(scan.probability[mid] < 1e-6);

    for (int k : {0, 37, 120, 200, 240})
        CHECK(scan.probability[k] ==
              doctest::Approx(hom_probability_oracle(j, scan.delay_ps[k])).epsilon(1e-9));

    // far from the dip the scan sits at the accidental baseline 1/2
    CHECK(scan.probability.front() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(scan.baseline == doctest::Approx(0.5));
}

TEST_CASE("hom scan symmetry and bounds") {
    const auto j = model_jsa(3.6, 256);
    const auto scan = hom_scan(j, 10.0, 201);
    const int n = static_cast<int>(scan.probability.size());
    for (int k = 0; k < n; ++k) {
        CHECK(std::abs(scan.probability[k] - scan.probability[n - 1 - k]) < 1e-12);
        CHECK(scan.probability[k] >= 0.0);
        CHECK(scan.probability[k] <= 0.5 * (1.0 + 1e-9));
    }
}

TEST_CASE("dip width matches the coherence time and is pump independent") {
    double widths[3];
    int idx = 0;
    for (double pump : {5.6, 3.6, 2.4}) {
        const auto j = model_jsa(pump, 256);
        const auto vis = visibility(hom_scan(j, 16.0, 321));
        widths[idx++] = vis.dip_fwhm_ps;
        CHECK(vis.v_fit == doctest::Approx(1.0).epsilon(5e-3));
        CHECK(vis.residual_rms < 0.02);
    }
    // the dip is set by the phase-matching bandwidth, not the pump
    CHECK(widths[1] == doctest::Approx(widths[0]).epsilon(0.05));
    CHECK(widths[2] == doctest::Approx(widths[0]).epsilon(0.05));
    // frozen value for the 5.6 nm pump; reference measurement is 1.92 ps +- 15%
    CHECK(widths[0] == doctest::Approx(1.738).epsilon(0.02));
    CHECK(widths[0] > 1.92 * 0.85);
    CHECK(widths[0] < 1.92 * 1.15);
}

TEST_CASE("visibility is stable under grid refinement") {
    const auto va = visibility(hom_scan(model_jsa(2.4, 256), 16.0, 241));
    const auto vb = visibility(hom_scan(model_jsa(2.4, 512), 16.0, 241));
    CHECK(std::abs(va.v_fit - vb.v_fit) < 1e-3);
}

TEST_CASE("visibility edge cases") {
    HomScan flat;
    for (int i = 0; i < 41; ++i) {
        flat.delay_ps.push_back(i - 20.0);
        flat.probability.push_back(0.5);
    }
    CHECK(visibility(flat).v_raw == doctest::Approx(0.0));
    CHECK(visibility(flat).v_fit == doctest::Approx(0.0));

    // a scan that barely brackets the dip cannot certify the baseline
    const auto j = model_jsa(5.6, 256);
    CHECK_THROWS_AS(visibility(hom_scan(j, 2.0, 41)), std::range_error);
}

TEST_CASE("shot noise leaves the fit within its confidence interval") {
    const auto j = model_jsa(3.6, 256);
    auto scan = hom_scan(j, 16.0, 161);
    const auto noisy = add_shot_noise(scan, 20000, 2024);
    CHECK(noisy.baseline == doctest::Approx(10000.0));
    const auto vis = visibility(noisy);
    CHECK(vis.v_fit == doctest::Approx(1.0).epsilon(0.05));
    CHECK(vis.ci95 > 1e-4);
    CHECK(vis.ci95 < 0.05);
    CHECK(std::abs(vis.v_fit - 1.0) < 3.0 * vis.ci95 + 0.01);
}

TEST_CASE("exchange overlap and distinguishable-state dip") {
    // an asymmetric state (eps != 0 tilts the amplitude) has P(0) = (1-O)/2
    const auto& c = calibrated();
    FrequencyGrid grid = build_grid(1582.0, 20.0, 256);
    PumpSpectrum pump;
    pump.fwhm_nm = 3.6;
    DispersionModel model = c.model;
    model.eps = 0.4 * model.delta;
    const auto j = build_jsa(grid, pump, c.apodized, model);
    const double o = exchange_overlap(j);
    CHECK(o < 1.0 - 1e-4);
    const auto scan = hom_scan(j, 0.5, 9);
    CHECK(scan.probability[4] == doctest::Approx(0.5 * (1.0 - o)).epsilon(1e-9));
}

TEST_CASE("imperfect visibility factors") {
    const auto j = model_jsa(5.6, 256);
    // ideal optics leave the ideal visibility untouched
    CHECK(imperfect_visibility(j, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
    // 1% leakage and a 49:51 splitter: reference value 0.978
    const double v = imperfect_visibility(j, 0.01, 0.49);
    CHECK(v == doctest::Approx(0.97937).epsilon(2e-4));
    CHECK(v > 0.975);
    CHECK(v < 0.981);
    CHECK_THROWS_AS(imperfect_visibility(j, 0.6, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(imperfect_visibility(j, 0.0, 1.2), std::invalid_argument);
}

TEST_CASE("monte carlo dip depth agrees with the closed-form factors") {
    // photons interfere only when neither leaks (probability (1-l)^2) and the
    // splitter interference contrast is 2RT/(R^2+T^2); simulate Bernoulli
    // leaks and splitter routing, compare the dip depth with the closed form
    const double l = 0.01, r = 0.49, t = 1.0 - r;
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const long long trials = 4000000;
    long long n_min = 0, n_max = 0;
    for (long long k = 0; k < trials; ++k) {
        const bool leak_a = u(eng) < l;
        const bool leak_b = u(eng) < l;
        // outside the dip: photons are distinguishable
        const double p_cc_out = r * t + t * r;  // both transmitted-reflected ways
        if (u(eng) < p_cc_out) ++n_max;
        // inside the dip: indistinguishable unless either photon leaked
        const double p_cc_in = (leak_a || leak_b) ? p_cc_out : (r - t) * (r - t);
        if (u(eng) < p_cc_in) ++n_min;
    }
    const double depth = static_cast<double>(n_max - n_min) / n_max;
    const double closed = (2.0 * r * t / (r * r + t * t)) * (1.0 - 2.0 * l + 2.0 * l * l);
    CHECK(depth == doctest::Approx(closed).epsilon(0.003));
    // and the closed form sits on top of imperfect_visibility's factor
    const auto j = model_jsa(5.6, 128);
    CHECK(imperfect_visibility(j, l, r) == doctest::Approx(closed).epsilon(0.003));
}

TEST_CASE("bandpass keeps the symmetric-state visibility maximal") {
    const auto j = model_jsa(5.6, 256);
    const auto filtered = apply_bandpass(j, j.grid.center_nm, 10.0, FilterShape::rectangular);
    const double v0 = exchange_overlap(j) / (2.0 - exchange_overlap(j));
    const double v1 = exchange_overlap(filtered) / (2.0 - exchange_overlap(filtered));
    CHECK(v1 >= v0 - 1e-12);
    CHECK(v1 == doctest::Approx(1.0).epsilon(1e-9));

    // a much wider filter than the grid leaves the state untouched
    const auto wide = apply_bandpass(j, j.grid.center_nm, 10.0 * j.grid.span_nm,
                                     FilterShape::rectangular);
    CHECK((wide.f - j.f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bandpass raises visibility of an asymmetric state") {
    const auto& c = calibrated();
    FrequencyGrid grid = build_grid(1582.0, 20.0, 256);
    PumpSpectrum pump;
    pump.fwhm_nm = 5.6;
    DispersionModel model = c.model;
    model.eps = 0.3 * model.delta;
    const auto j = build_jsa(grid, pump, c.apodized, model);
    const auto filtered = apply_bandpass(j, grid.center_nm, 10.0, FilterShape::rectangular);
    const double v0 = exchange_overlap(j) / (2.0 - exchange_overlap(j));
    const double v1 = exchange_overlap(filtered) / (2.0 - exchange_overlap(filtered));
    CHECK(v1 > v0);
}

TEST_CASE("field autocorrelation of a gaussian spectrum is analytic") {
    // S(nu) = exp(-nu^2 / (2 s^2)): envelope is exp(-s^2 tau^2 / 2), whose
    // FWHM is 2 sqrt(2 ln 2) / s
    const double s = 2.0e12;
    std::vector<double> nu(801), spec(801);
    for (int i = 0; i < 801; ++i) {
        nu[i] = (i - 400) * 2.5e10;
        spec[i] = std::exp(-nu[i] * nu[i] / (2.0 * s * s));
    }
    const auto ac = field_autocorrelation(nu, spec, 1582.0);
    CHECK(!ac.unresolved);
    const double expect_ps = 2.0 * std::sqrt(2.0 * kLn2) / s * 1e12;
    CHECK(ac.envelope_fwhm_ps == doctest::Approx(expect_ps).epsilon(1e-3));
    CHECK(ac.duration_fwhm_ps == doctest::Approx(expect_ps / 2.0).epsilon(1e-3));
}

TEST_CASE("marginal autocorrelations give the expected duration scale") {
    // broad pump: short coherence, broad implied bandwidth
    const auto jb = model_jsa(5.6, 256);
    const auto mb = marginals(jb);
    std::vector<double> nu(jb.grid.detuning.begin(), jb.grid.detuning.end());
    const auto ab = field_autocorrelation(nu, mb.signal, jb.grid.center_nm);
    CHECK(ab.duration_fwhm_ps > 0.25);
    CHECK(ab.duration_fwhm_ps < 0.45);
    CHECK(ab.implied_bandwidth_nm == doctest::Approx(mb.signal_fwhm_nm).epsilon(0.10));

    // narrow pump: long coherence, narrow implied bandwidth
    const auto jn = model_jsa(0.95, 256);
    const auto mn = marginals(jn);
    std::vector<double> nun(jn.grid.detuning.begin(), jn.grid.detuning.end());
    const auto an = field_autocorrelation(nun, mn.signal, jn.grid.center_nm);
    CHECK(an.duration_fwhm_ps > 1.0);
    CHECK(an.duration_fwhm_ps < 1.6);
    CHECK(an.implied_bandwidth_nm == doctest::Approx(mn.signal_fwhm_nm).epsilon(0.10));
}

TEST_CASE("monochromatic spectrum is unresolved") {
    std::vector<double> nu = {-1e12, 0.0, 1e12};
    std::vector<double> spec = {0.0, 1.0, 0.0};
    // all weight in one sample: zero spectral variance
    const auto ac = field_autocorrelation(nu, spec, 1582.0);
    CHECK(ac.unresolved);
    CHECK_THROWS_AS(field_autocorrelation(nu, std::vector<double>{0.0, 0.0, 0.0}, 1582.0),
                    EmptyDataError);
}

TEST_CASE("entanglement witness on marginal vs phase-matching widths") {
    const auto broad = entanglement_witness(10.2, 2.2);
    CHECK(broad.ratio == doctest::Approx(4.636).epsilon(0.01));
    CHECK(broad.entangled);
    const auto equal = entanglement_witness(2.2, 2.2);
    CHECK(equal.ratio == doctest::Approx(1.0));
    CHECK(!equal.entangled);
    const auto close = entanglement_witness(2.6, 2.2);
    CHECK(close.ratio == doctest::Approx(1.18).epsilon(0.01));
    CHECK(!close.entangled);
    CHECK_THROWS_AS(entanglement_witness(-1.0, 2.2), std::invalid_argument);
}
