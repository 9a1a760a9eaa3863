#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/poling.hpp"
#include "test_support.hpp"

using namespace biphoton;
using namespace biphoton::testsupport;

namespace {

// positive-domain length inside [z0, z1]
double positive_length(const PolingDesign& d, double z0, double z1) {
    double acc = 0;
    for (size_t m = 0; m < d.sign.size(); ++m) {
        if (d.sign[m] != 1) continue;
        const double a = std::max(d.boundary_m[m], z0);
        const double b = std::min(d.boundary_m[m + 1], z1);
        if (b > a) acc += b - a;
    }
    return acc;
}

}  // namespace

TEST_CASE("uniform poling geometry and response") {
    const auto d = uniform_poling(46.1, 18.0);
    d.validate();
    CHECK(d.boundary_m.front() == 0.0);
    CHECK(d.boundary_m.back() == doctest::Approx(0.018).epsilon(1e-15));
    CHECK(d.kind == "uniform");

    // every full period is split 50:50
    const int full = static_cast<int>(d.length_m / d.period_m);
    for (int p = 0; p < full; ++p) {
        const double z0 = p * d.period_m;
        CHECK(positive_length(d, z0, z0 + d.period_m) ==
              doctest::Approx(d.period_m / 2).epsilon(1e-9));
    }

    // first-order QPM response of 50:50 poling: |phi(K0)| = 2/pi
    // (up to the clipped final period, a ~1e-3 relative effect)
    const double mag = std::abs(phase_matching_amplitude(d, d.qpm_k()));
    CHECK(mag == doctest::Approx(2.0 / kPi).epsilon(5e-3));

    // net duty ~ 1/2 each sign: phi(0) is the tiny remainder imbalance
    CHECK(std::abs(phase_matching_amplitude(d, 0.0)) < 2e-3);
}

TEST_CASE("phase matching amplitude is continuous at k = 0") {
    const auto d = uniform_poling(46.1, 18.0);
    const double eps_k = 1e-9 / d.length_m;
    const auto a = phase_matching_amplitude(d, 0.0);
    const auto b = phase_matching_amplitude(d, eps_k);
    CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("batch evaluation agrees with the direct domain sum") {
    const auto& c = calibrated();
    for (const auto* d : {&c.uniform, &c.apodized}) {
        std::vector<double> k;
        const double k0 = d->qpm_k();
        for (int i = -6; i <= 6; ++i) k.push_back(k0 + i * 417.3);
        k.push_back(0.0);
        k.push_back(1e-14);
        std::vector<std::complex<double>> out(k.size());
        phase_matching_batch(*d, k, out);
        for (size_t i = 0; i < k.size(); ++i) {
            const auto direct = phase_matching_amplitude(*d, k[i]);
            CHECK(std::abs(out[i] - direct) < 1e-11);
        }
    }
}

TEST_CASE("apodized design geometry") {
    const auto d = apodized_poling(46.1, 18.0);
    d.validate();
    CHECK(d.kind == "apodized");
    CHECK(d.boundary_m.front() == 0.0);
    CHECK(d.boundary_m.back() == doctest::Approx(0.018).epsilon(1e-15));
    CHECK(d.mirror_symmetric());

    // nominal duties respect the limits and the measured positive fraction
    // per full lattice period matches the recorded duty to < 1e-9 relative
    const double L = d.length_m;
    const int half_periods = static_cast<int>((L / 2) / d.period_m);
    const size_t n_duty = d.duty.size();
    for (size_t p = 0; p < n_duty; ++p) {
        CHECK(d.duty[p] >= 0.1 - 1e-12);
        CHECK(d.duty[p] <= 0.9 + 1e-12);
    }
    for (int m = 0; m < half_periods; ++m) {
        const double z0 = L / 2 + m * d.period_m;
        const double frac = positive_length(d, z0, z0 + d.period_m) / d.period_m;
        const double nominal = d.duty[n_duty / 2 + m];
        CHECK(frac == doctest::Approx(nominal).epsilon(1e-9));
    }
}

TEST_CASE("apodized response: real when centered, tracks the envelope") {
    const auto d = apodized_poling(46.1, 18.0);
    const double k0 = d.qpm_k();
    std::vector<double> k;
    for (int i = 0; i <= 100; ++i) k.push_back(k0 - 4000.0 + 80.0 * i);
    std::vector<std::complex<double>> out(k.size());
    phase_matching_batch(d, k, out, /*centered=*/true);
    for (const auto& v : out) CHECK(std::abs(v.imag()) < 1e-12);

    // |phi(K0)| approximates the envelope mean times the 2/pi QPM factor:
    // sum_n sin(pi D_n) tracks g, so phi(K0) ~ (2/pi)(1/L) integral g dz
    const double sigma = (d.length_m / 2) / std::sqrt(2.0 * std::log(1.0 / 0.05));
    double mean = 0;
    const int nn = 20001;
    for (int i = 0; i < nn; ++i) {
        const double z = d.length_m * i / (nn - 1);
        mean += std::exp(-(z - d.length_m / 2) * (z - d.length_m / 2) / (2 * sigma * sigma));
    }
    mean /= nn;
    const double expect = 2.0 / kPi * mean;
    CHECK(std::abs(phase_matching_amplitude(d, k0)) == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("apodized options are validated") {
    ApodizationOptions bad;
    bad.duty_min = 0.0;
    CHECK_THROWS_AS(apodized_poling(46.1, 18.0, bad), std::invalid_argument);
    bad = {};
    bad.duty_max = 0.95;  // asymmetric against duty_min = 0.1
    CHECK_THROWS_AS(apodized_poling(46.1, 18.0, bad), std::invalid_argument);
    bad = {};
    bad.envelope_edge = 1.5;
    CHECK_THROWS_AS(apodized_poling(46.1, 18.0, bad), std::invalid_argument);
    CHECK_THROWS_AS(uniform_poling(-46.1, 18.0), std::invalid_argument);
    CHECK_THROWS_AS(uniform_poling(46.1, 0.01), std::invalid_argument);
}

TEST_CASE("domain table round trip") {
    const auto d = apodized_poling(46.1, 18.0);
    std::stringstream ss;
    save_domain_table(ss, d);
    const auto back = load_domain_table(ss);
    REQUIRE(back.sign.size() == d.sign.size());
    // the table stores um/mm: unit conversion costs at most one rounding
    CHECK(back.period_m == doctest::Approx(d.period_m).epsilon(1e-14));
    CHECK(back.length_m == doctest::Approx(d.length_m).epsilon(1e-14));
    for (size_t i = 1; i < d.boundary_m.size(); ++i)
        CHECK(back.boundary_m[i] == doctest::Approx(d.boundary_m[i]).epsilon(1e-14));
    CHECK(back.boundary_m.front() == 0.0);
    for (size_t i = 0; i < d.sign.size(); ++i) CHECK(back.sign[i] == d.sign[i]);
}

TEST_CASE("domain table parse errors") {
    {
        std::stringstream ss("# period_um 46.1\n0 23.05 +1\nnot a record\n");
        CHECK_THROWS_AS(load_domain_table(ss), ParseError);
    }
    {
        std::stringstream ss("# nothing here\n");
        CHECK_THROWS_AS(load_domain_table(ss), EmptyDataError);
    }
    {
        // gap between domains
        std::stringstream ss("# period_um 46.1\n0 23.05 +1\n30 46.1 -1\n");
        CHECK_THROWS_AS(load_domain_table(ss), ParseError);
    }
    {
        // missing period header
        std::stringstream ss("0 23.05 +1\n23.05 46.1 -1\n");
        CHECK_THROWS_AS(load_domain_table(ss), ParseError);
    }
    {
        // parse errors carry the line number
        std::stringstream ss("# period_um 46.1\n0 23.05 +1\nbroken\n");
        try {
            load_domain_table(ss);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
        }
    }
}
