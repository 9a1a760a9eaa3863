#include "biphoton/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/fit.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton {

JointSpectralAmplitude build_jsa(const FrequencyGrid& grid, const PumpSpectrum& pump,
                                 const PolingDesign& poling, const DispersionModel& model) {
    pump.validate();
    poling.validate();
    const int n = grid.points;
    if (n < 2) throw std::invalid_argument("grid is empty");

    JointSpectralAmplitude jsa;
    jsa.grid = grid;
    jsa.f.resize(n, n);

    // pump amplitude on the sum lattice nu_s + nu_i
    const double lo = grid.detuning.front();
    std::vector<double> alpha(2 * n - 1);
    for (int m = 0; m < 2 * n - 1; ++m)
        alpha[m] = pump_amplitude(pump, 2 * lo + m * grid.step);

    const double k0 = poling.qpm_k();
    if (model.eps == 0.0) {
        // phi depends on nu_s - nu_i only: evaluate the 2n-1 antidiagonals
        std::vector<double> k(2 * n - 1);
        for (int d = -(n - 1); d <= n - 1; ++d)
            k[d + n - 1] = k0 + model.delta * d * grid.step;
        std::vector<std::complex<double>> phi(2 * n - 1);
        phase_matching_batch(poling, k, phi, /*centered=*/true);

        if (poling.mirror_symmetric()) {
            // The first-order model of a symmetric design is even about the
            // grating vector; project out the sub-percent quantization-noise
            // asymmetry of the exact domain sum so f == f^T exactly.
            for (int d = 1; d <= n - 1; ++d) {
                const auto even = 0.5 * (phi[n - 1 + d] + phi[n - 1 - d]);
                phi[n - 1 + d] = even;
                phi[n - 1 - d] = even;
            }
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                jsa.f(i, j) = alpha[i + j] * phi[i - j + n - 1];
    } else {
        std::vector<double> k(n);
        std::vector<std::complex<double>> phi(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                k[j] = k0 + model.mismatch(grid.detuning[i], grid.detuning[j]);
            phase_matching_batch(poling, k, phi, /*centered=*/true);
            for (int j = 0; j < n; ++j) jsa.f(i, j) = alpha[i + j] * phi[j];
        }
    }

    const double nrm = std::sqrt(jsa.f.squaredNorm()) * grid.step;
    if (!(nrm > 0)) throw std::range_error("joint amplitude vanished on this grid");
    jsa.f /= nrm;

    // coverage warnings: want span >= 3x the larger physical bandwidth
    const double span_nu = grid.detuning.back() - grid.detuning.front();
    if (span_nu < 3.0 * pump.bandwidth_omega())
        jsa.notes.push_back("grid span below 3x the pump bandwidth");
    if (model.delta != 0.0) {
        const double pm = phase_matching_fwhm_nu(poling, model.delta);
        if (span_nu < 3.0 * pm)
            jsa.notes.push_back("grid span below 3x the phase-matching bandwidth");
    }
    return jsa;
}

Eigen::MatrixXd jsi(const JointSpectralAmplitude& jsa) { return jsa.f.cwiseAbs2(); }

Marginals marginals(const JointSpectralAmplitude& jsa) {
    const int n = jsa.grid.points;
    Marginals mg;
    mg.signal.resize(n);
    mg.idler.resize(n);
    const Eigen::MatrixXd inten = jsi(jsa);
    for (int i = 0; i < n; ++i) {
        mg.signal[i] = inten.row(i).sum() * jsa.grid.step;
        mg.idler[i] = inten.col(i).sum() * jsa.grid.step;
    }
    auto width = [&](const std::vector<double>& m) {
        try {
            return fit_gaussian_1d(jsa.grid.wavelength_nm, m).fwhm;
        } catch (const FitError&) {
            mg.fit_fallback = true;
            double m0 = 0, m1 = 0, m2 = 0;
            for (int i = 0; i < n; ++i) {
                m0 += m[i];
                m1 += m[i] * jsa.grid.wavelength_nm[i];
                m2 += m[i] * jsa.grid.wavelength_nm[i] * jsa.grid.wavelength_nm[i];
            }
            const double mean = m1 / m0;
            return kFwhmPerSigma * std::sqrt(std::max(m2 / m0 - mean * mean, 0.0));
        }
    };
    mg.signal_fwhm_nm = width(mg.signal);
    mg.idler_fwhm_nm = width(mg.idler);
    return mg;
}

SchmidtReport schmidt_decompose(const Eigen::MatrixXcd& f, double cell_area) {
    if (f.size() == 0 || f.norm() == 0)
        throw std::invalid_argument("schmidt decomposition of a zero amplitude");
    if (cell_area <= 0) throw std::invalid_argument("cell area must be positive");

    Eigen::VectorXd sv;
    double max_imag = 0;
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j)
            max_imag = std::max(max_imag, std::abs(f(i, j).imag()));
    if (max_imag < 1e-12 * f.norm()) {
        Eigen::MatrixXd fr = f.real();
        sv = Eigen::BDCSVD<Eigen::MatrixXd>(fr).singularValues();
    } else {
        sv = Eigen::BDCSVD<Eigen::MatrixXcd>(f).singularValues();
    }

    SchmidtReport rep;
    const double total = sv.squaredNorm();
    rep.lambda.reserve(sv.size());
    double sum_sq = 0;
    for (int i = 0; i < sv.size(); ++i) {
        const double l = sv[i] * sv[i] / total;
        rep.lambda.push_back(l);
        sum_sq += l * l;
    }
    rep.schmidt_number = 1.0 / sum_sq;
    rep.purity = sum_sq;
    return rep;
}

SchmidtReport purity_from_jsi(const Eigen::MatrixXd& intensity, double cell_area) {
    if (intensity.minCoeff() < 0)
        throw std::invalid_argument("intensity matrix has negative entries");
    Eigen::MatrixXcd f = intensity.cwiseSqrt().cast<std::complex<double>>();
    SchmidtReport rep = schmidt_decompose(f, cell_area);
    rep.upper_bound = true;  // phases discarded
    return rep;
}

double side_lobe_suppression_db(const FrequencyGrid& grid, const Eigen::MatrixXd& intensity) {
    if (intensity.rows() != grid.points || intensity.cols() != grid.points)
        throw std::invalid_argument("intensity does not match the grid");
    const double peak = intensity.maxCoeff();
    if (peak <= 0) throw std::invalid_argument("intensity has no peak");

    Gaussian2dFit fit = fit_gaussian_2d(grid.detuning, grid.detuning, intensity, 0.05);
    const double ux = fit.axis_major_x, uy = fit.axis_major_y;    // major axis
    const double vx = -fit.axis_major_y, vy = fit.axis_major_x;   // minor axis
    // radius 1.5 FWHM: a Gaussian main lobe decays to ~-27 dB here, below
    // the 24 dB floor the lobe check needs
    const double ra = 3.0 * fit.fwhm_major / 2;
    const double rb = 3.0 * fit.fwhm_minor / 2;

    double max_outside = 0;
    for (int i = 0; i < grid.points; ++i)
        for (int j = 0; j < grid.points; ++j) {
            const double dx = grid.detuning[i] - fit.center_x;
            const double dy = grid.detuning[j] - fit.center_y;
            const double a = (dx * ux + dy * uy) / ra;
            const double b = (dx * vx + dy * vy) / rb;
            if (a * a + b * b > 1.0)
                max_outside = std::max(max_outside, intensity(i, j));
        }
    if (max_outside < peak * 1e-12) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak / max_outside);
}

JointSpectralAmplitude apply_bandpass(const JointSpectralAmplitude& jsa, double center_nm,
                                      double width_nm, FilterShape shape) {
    if (width_nm <= 0) throw std::invalid_argument("filter width must be positive");
    JointSpectralAmplitude out = jsa;
    const int n = jsa.grid.points;
    const double wl = jsa.grid.center_nm * 1e-9;
    const double w_nu = kTwoPi * kSpeedOfLight * (width_nm * 1e-9) / (wl * wl);
    const double nu_c = detuning_from_wavelength(center_nm, jsa.grid.center_nm);

    std::vector<double> t(n);  // amplitude transmission
    for (int i = 0; i < n; ++i) {
        const double nu = jsa.grid.detuning[i] - nu_c;
        if (shape == FilterShape::rectangular)
            t[i] = std::abs(nu) <= w_nu / 2 ? 1.0 : 0.0;
        else
            t[i] = std::exp(-2.0 * kLn2 * nu * nu / (w_nu * w_nu));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.f(i, j) *= t[i] * t[j];

    const double nrm = std::sqrt(out.f.squaredNorm()) * jsa.grid.step;
    if (!(nrm > 0)) throw std::range_error("bandpass removed the entire amplitude");
    out.f /= nrm;
    out.notes.push_back("bandpass " + std::to_string(width_nm) + " nm applied; renormalized");
    return out;
}

}  // namespace biphoton
