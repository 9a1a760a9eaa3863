#include "biphoton/dispersion.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/fit.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/poling.hpp"

namespace biphoton {

DfgScan dfg_scan(const PolingDesign& poling, const DispersionModel& model,
                 double center_nm, double range_nm, int points) {
    if (points < 5) throw std::invalid_argument("dfg scan needs at least 5 points");
    if (range_nm <= 0) throw std::invalid_argument("dfg scan range must be positive");

    DfgScan scan;
    scan.wavelength_nm.resize(points);
    scan.intensity.resize(points);
    const double k0 = poling.qpm_k();
    std::vector<double> k(points);
    for (int i = 0; i < points; ++i) {
        const double wl = center_nm - range_nm / 2 + range_nm * i / (points - 1);
        scan.wavelength_nm[i] = wl;
        const double nu = detuning_from_wavelength(wl, center_nm);
        // probe plays the idler at +nu, signal mirrors at -nu
        k[i] = k0 + model.mismatch(-nu, nu);
    }
    std::vector<std::complex<double>> phi(points);
    phase_matching_batch(poling, k, phi);
    double peak = 0;
    for (int i = 0; i < points; ++i) {
        scan.intensity[i] = std::norm(phi[i]);
        peak = std::max(peak, scan.intensity[i]);
    }
    if (peak <= 0) throw CalibrationError("dfg scan saw no response");
    for (auto& v : scan.intensity) v /= peak;
    scan.fwhm_nm = fwhm_interpolated(scan.wavelength_nm, scan.intensity);
    return scan;
}

double calibrate_gvm(double target_fwhm_nm, const PolingDesign& poling, double center_nm) {
    if (target_fwhm_nm <= 0) throw std::invalid_argument("target width must be positive");

    auto width = [&](double delta) {
        DispersionModel m{delta, 0.0};
        // widen the probe window until the curve fits inside it
        double range = std::max(6.0 * target_fwhm_nm, 4.0);
        for (int i = 0; i < 10; ++i) {
            try {
                return dfg_scan(poling, m, center_nm, range, 1201).fwhm_nm;
            } catch (const FitError&) {
                range *= 4;
            }
        }
        throw CalibrationError("dfg width did not fit any probe window");
    };

    // width(delta) falls monotonically with delta; bracket then bisect
    double lo = 1e-11, hi = 1e-9;
    int guard = 0;
    while (width(lo) < target_fwhm_nm) {
        lo /= 4;
        if (++guard > 40) throw CalibrationError("failed to bracket calibration from below");
    }
    guard = 0;
    while (width(hi) > target_fwhm_nm) {
        hi *= 4;
        if (++guard > 40) throw CalibrationError("failed to bracket calibration from above");
    }
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double w = width(mid);
        if (std::abs(w - target_fwhm_nm) < 1e-4 * target_fwhm_nm) return mid;
        (w > target_fwhm_nm ? lo : hi) = mid;
    }
    throw CalibrationError("calibration bisection did not converge");
}

TimeBandwidth time_bandwidth_check(double fwhm_nm, double center_nm) {
    if (fwhm_nm <= 0 || center_nm <= 0)
        throw std::invalid_argument("widths must be positive");
    TimeBandwidth tb;
    const double wl = center_nm * 1e-9;
    const double df = kSpeedOfLight * (fwhm_nm * 1e-9) / (wl * wl);  // Hz
    tb.bandwidth_thz = df * 1e-12;
    tb.duration_ps = kGaussianTbp / df * 1e12;
    return tb;
}

}  // namespace biphoton
