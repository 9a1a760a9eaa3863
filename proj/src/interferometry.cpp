#include "biphoton/interferometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/fit.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton {

namespace {

// H_d = sum over the antidiagonal offset d of f(s,i) * conj(f(i,s)) * step^2,
// so that P(tau) = 1/2 (1 - Re sum_d H_d e^{i d step tau}).
void exchange_diagonals(const JointSpectralAmplitude& jsa, std::vector<double>& dvals,
                        std::vector<double>& hre, std::vector<double>& him) {
    const int n = jsa.grid.points;
    const double w = jsa.grid.step * jsa.grid.step;
    dvals.assign(2 * n - 1, 0.0);
    hre.assign(2 * n - 1, 0.0);
    him.assign(2 * n - 1, 0.0);
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i) {
            const std::complex<double> v = jsa.f(s, i) * std::conj(jsa.f(i, s)) * w;
            const int d = i - s + n - 1;
            hre[d] += v.real();
            him[d] += v.imag();
        }
    for (int d = 0; d < 2 * n - 1; ++d) dvals[d] = (d - (n - 1)) * jsa.grid.step;
}

}  // namespace

HomScan hom_scan(const JointSpectralAmplitude& jsa, std::span<const double> delay_ps) {
    std::vector<double> dvals, hre, him;
    exchange_diagonals(jsa, dvals, hre, him);

    std::vector<double> tau(delay_ps.size());
    for (size_t i = 0; i < delay_ps.size(); ++i) tau[i] = delay_ps[i] * 1e-12;
    std::vector<std::complex<double>> acc(tau.size());
    kernels::cis_sum_complex(dvals, hre, him, tau, acc);

    HomScan scan;
    scan.delay_ps.assign(delay_ps.begin(), delay_ps.end());
    scan.probability.resize(tau.size());
    for (size_t i = 0; i < tau.size(); ++i)
        scan.probability[i] = std::max(0.5 * (1.0 - acc[i].real()), 0.0);
    return scan;
}

HomScan hom_scan(const JointSpectralAmplitude& jsa, double span_ps, int points) {
    if (points < 2 || span_ps <= 0)
        throw std::invalid_argument("hom scan needs a positive span and >= 2 points");
    std::vector<double> delays(points);
    for (int i = 0; i < points; ++i)
        delays[i] = -span_ps / 2 + span_ps * i / (points - 1);
    return hom_scan(jsa, delays);
}

HomVisibility visibility(const HomScan& scan) {
    if (scan.delay_ps.size() < 8)
        throw std::invalid_argument("hom visibility needs at least 8 samples");
    const int n = static_cast<int>(scan.delay_ps.size());

    // baseline from the upper quartile of samples
    std::vector<double> sorted = scan.probability;
    std::sort(sorted.begin(), sorted.end());
    double baseline = 0;
    const int q = std::max(n / 4, 1);
    for (int i = n - q; i < n; ++i) baseline += sorted[i];
    baseline /= q;
    if (baseline <= 0) throw FitError("hom scan has no baseline");

    const auto mn = std::min_element(scan.probability.begin(), scan.probability.end());
    const double mx = sorted.back();
    HomVisibility out;
    out.v_raw = (mx + *mn > 0) ? (mx - *mn) / (mx + *mn) : 0.0;
    if (baseline - *mn < 1e-12 * baseline) return out;  // flat scan, no dip

    const double t_min = scan.delay_ps[mn - scan.probability.begin()];
    double sigma0 = (scan.delay_ps.back() - scan.delay_ps.front()) / 10;
    for (int i = static_cast<int>(mn - scan.probability.begin()); i < n; ++i)
        if (scan.probability[i] > baseline - (baseline - *mn) / 2) {
            sigma0 = std::max((scan.delay_ps[i] - t_min) / 1.1774, 1e-6);
            break;
        }

    Eigen::VectorXd p0(4);
    p0 << baseline, out.v_raw, t_min, sigma0;
    auto model = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) {
            const double d = (scan.delay_ps[i] - p[2]) / p[3];
            r[i] = p[0] * (1.0 - p[1] * std::exp(-0.5 * d * d)) - scan.probability[i];
        }
        return r;
    };
    LmResult lm = levenberg_marquardt(model, p0);
    if (!lm.converged) throw FitError("hom dip fit did not converge");

    out.v_fit = lm.params[1];
    out.dip_center_ps = lm.params[2];
    out.dip_fwhm_ps = kFwhmPerSigma * std::abs(lm.params[3]);
    out.ci95 = 1.96 * std::sqrt(std::max(lm.covariance(1, 1), 0.0));
    out.residual_rms = lm.residual_rms / lm.params[0];

    const double reach = std::max(std::abs(scan.delay_ps.front() - out.dip_center_ps),
                                  std::abs(scan.delay_ps.back() - out.dip_center_ps));
    if (reach < 3.0 * out.dip_fwhm_ps)
        throw std::range_error("hom scan does not reach 3 dip widths past the center");
    return out;
}

double exchange_overlap(const JointSpectralAmplitude& jsa) {
    const double w = jsa.grid.step * jsa.grid.step;
    double o = 0;
    const int n = jsa.grid.points;
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i)
            o += (jsa.f(s, i) * std::conj(jsa.f(i, s))).real() * w;
    return o;
}

double imperfect_visibility(const JointSpectralAmplitude& jsa, double leakage,
                            double reflectance) {
    if (leakage < 0 || leakage >= 0.5)
        throw std::invalid_argument("leakage probability must lie in [0, 0.5)");
    if (reflectance <= 0 || reflectance >= 1)
        throw std::invalid_argument("reflectance must lie in (0, 1)");
    const double o = exchange_overlap(jsa);
    const double v_ideal = o / (2.0 - o);
    const double r = reflectance, t = 1.0 - reflectance;
    return v_ideal * (2.0 * r * t / (r * r + t * t)) * (1.0 - 2.0 * leakage);
}

HomScan add_shot_noise(const HomScan& scan, long long pairs_per_delay, std::uint64_t seed) {
    if (pairs_per_delay <= 0) throw std::invalid_argument("pair count must be positive");
    std::mt19937_64 eng(seed);
    auto uniform_open = [&]() { return ((eng() >> 11) + 1) * 0x1.0p-53; };
    auto normal = [&]() {
        const double u1 = uniform_open();
        const double u2 = (eng() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    };
    auto poisson = [&](double mean) -> double {
        if (mean <= 0) return 0;
        if (mean > 50.0) return std::max(0.0, std::floor(mean + std::sqrt(mean) * normal() + 0.5));
        const double limit = std::exp(-mean);
        double prod = uniform_open();
        long long k = 0;
        while (prod > limit) {
            prod *= uniform_open();
            ++k;
        }
        return static_cast<double>(k);
    };
    HomScan noisy = scan;
    for (auto& p : noisy.probability)
        p = poisson(static_cast<double>(pairs_per_delay) * p);
    noisy.baseline = static_cast<double>(pairs_per_delay) * scan.baseline;
    return noisy;
}

EntanglementWitness entanglement_witness(double marginal_fwhm_nm,
                                         double phase_matching_fwhm_nm,
                                         double threshold) {
    if (marginal_fwhm_nm <= 0 || phase_matching_fwhm_nm <= 0 || threshold <= 0)
        throw std::invalid_argument("witness widths and threshold must be positive");
    EntanglementWitness w;
    w.ratio = marginal_fwhm_nm / phase_matching_fwhm_nm;
    w.entangled = w.ratio > threshold;
    return w;
}

Autocorrelation field_autocorrelation(std::span<const double> nu,
                                      std::span<const double> spectrum, double center_nm) {
    if (nu.size() != spectrum.size() || nu.size() < 3)
        throw std::invalid_argument("autocorrelation needs matching axes with >= 3 samples");
    double total = 0, m1 = 0, m2 = 0;
    for (size_t i = 0; i < nu.size(); ++i) {
        if (spectrum[i] < 0) throw std::invalid_argument("spectrum must be non-negative");
        total += spectrum[i];
        m1 += spectrum[i] * nu[i];
        m2 += spectrum[i] * nu[i] * nu[i];
    }
    if (total <= 0) throw EmptyDataError("spectrum is identically zero");
    const double mean = m1 / total;
    const double sigma_nu = std::sqrt(std::max(m2 / total - mean * mean, 0.0));

    Autocorrelation out;
    if (sigma_nu <= 0) {
        out.unresolved = true;
        return out;
    }
    const int points = 2001;
    const double tau_max = 8.0 / sigma_nu;
    std::vector<double> tau(points);
    for (int i = 0; i < points; ++i) tau[i] = -tau_max + 2 * tau_max * i / (points - 1);
    std::vector<std::complex<double>> acc(points);
    std::vector<double> w(spectrum.begin(), spectrum.end());
    std::vector<double> z(nu.begin(), nu.end());
    kernels::cis_sum(z, w, tau, acc);

    out.delay_ps.resize(points);
    out.envelope.resize(points);
    for (int i = 0; i < points; ++i) {
        out.delay_ps[i] = tau[i] * 1e12;
        out.envelope[i] = std::abs(acc[i]) / total;
    }
    try {
        out.envelope_fwhm_ps = fwhm_interpolated(out.delay_ps, out.envelope);
    } catch (const FitError&) {
        out.unresolved = true;
        return out;
    }
    // Gaussian convention: intensity-correlation width is twice the
    // single-photon duration, so report envelope FWHM / 2.
    out.duration_fwhm_ps = out.envelope_fwhm_ps / 2.0;
    const double df = kGaussianTbp / (out.duration_fwhm_ps * 1e-12);  // Hz
    const double wl = center_nm * 1e-9;
    out.implied_bandwidth_nm = df * wl * wl / kSpeedOfLight * 1e9;
    return out;
}

}  // namespace biphoton
