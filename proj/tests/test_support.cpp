#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

#include "biphoton/constants.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/pump.hpp"

namespace biphoton::testsupport {

const Calibrated& calibrated() {
    static const Calibrated c = [] {
        Calibrated out;
        out.apodized = apodized_poling(46.1, 18.0);
        out.uniform = uniform_poling(46.1, 18.0);
        out.model.delta = calibrate_gvm(2.2, out.apodized, 1582.0);
        out.model.eps = 0.0;
        return out;
    }();
    return c;
}

JointSpectralAmplitude model_jsa(double pump_fwhm_nm, int points, double span_nm) {
    const auto& c = calibrated();
    const FrequencyGrid grid = build_grid(1582.0, span_nm, points);
    PumpSpectrum pump;
    pump.center_nm = 791.0;
    pump.fwhm_nm = pump_fwhm_nm;
    return build_jsa(grid, pump, c.apodized, c.model);
}

double gaussian_purity_oracle(double sigma_plus, double sigma_minus) {
    return 2.0 * sigma_plus * sigma_minus / (sigma_plus * sigma_plus + sigma_minus * sigma_minus);
}

Eigen::MatrixXcd gaussian_jsa(const FrequencyGrid& grid, double sigma_plus,
                              double sigma_minus) {
    const int n = grid.points;
    Eigen::MatrixXcd f(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double p = grid.detuning[i] + grid.detuning[j];
            const double m = grid.detuning[i] - grid.detuning[j];
            f(i, j) = std::exp(-p * p / (4 * sigma_plus * sigma_plus) -
                               m * m / (4 * sigma_minus * sigma_minus));
        }
    return f;
}

namespace {

// regularized incomplete gamma functions (series / continued fraction)
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    double b = x + 1 - a, c = 1e300, d = 1 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi2_sf(double x, double dof) {
    if (x < 0 || dof <= 0) throw std::invalid_argument("chi2_sf domain");
    const double a = dof / 2, xx = x / 2;
    if (xx == 0) return 1.0;
    if (xx < a + 1) return 1.0 - gamma_p_series(a, xx);
    return gamma_q_contfrac(a, xx);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace biphoton::testsupport
