#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "biphoton/dispersion.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/poling.hpp"
#include "biphoton/pump.hpp"

namespace biphoton {

struct JointSpectralAmplitude {
    FrequencyGrid grid;                  // shared by signal (rows) and idler (cols)
    Eigen::MatrixXcd f;                  // normalized: sum |f|^2 * step^2 = 1
    std::vector<std::string> notes;      // warnings (grid coverage etc.)
};

// f(nu_s, nu_i) = alpha(nu_s + nu_i) * phi(K0 + dk(nu_s, nu_i)).
// With eps == 0 and a mirror-symmetric design, the first-order model is
// exchange-symmetric; the sub-percent quantization-noise asymmetry of the
// exact domain sum is projected out so f == f^T holds to machine precision.
JointSpectralAmplitude build_jsa(const FrequencyGrid& grid, const PumpSpectrum& pump,
                                 const PolingDesign& poling, const DispersionModel& model);

Eigen::MatrixXd jsi(const JointSpectralAmplitude& jsa);

struct Marginals {
    std::vector<double> signal;        // intensity vs grid wavelength
    std::vector<double> idler;
    double signal_fwhm_nm = 0;
    double idler_fwhm_nm = 0;
    bool fit_fallback = false;         // FWHM from moments, Gaussian fit failed
};

Marginals marginals(const JointSpectralAmplitude& jsa);

struct SchmidtReport {
    std::vector<double> lambda;   // descending, sums to 1
    double schmidt_number = 0;    // K = 1 / sum lambda_n^2
    double purity = 0;            // 1/K
    bool upper_bound = false;     // true when phases were discarded (JSI input)
};

// cell_area: quadrature weight per sample (grid step squared).
SchmidtReport schmidt_decompose(const Eigen::MatrixXcd& f, double cell_area);

// Phase-blind estimate from an intensity matrix (elementwise sqrt);
// flagged as an upper bound on the true purity.
SchmidtReport purity_from_jsi(const Eigen::MatrixXd& intensity, double cell_area);

// Worst side-lobe suppression of a joint intensity in dB: fits a rotated
// 2D Gaussian to the main lobe, masks an ellipse of 1.5x the fitted FWHM
// per principal axis, and reports peak / max-outside. Returns +inf when
// nothing outside exceeds peak * 1e-12.
double side_lobe_suppression_db(const FrequencyGrid& grid, const Eigen::MatrixXd& intensity);

enum class FilterShape { rectangular, gaussian };

// Apply identical signal/idler bandpass filters centered on the grid center.
JointSpectralAmplitude apply_bandpass(const JointSpectralAmplitude& jsa,
                                      double center_nm, double width_nm,
                                      FilterShape shape);

}  // namespace biphoton
