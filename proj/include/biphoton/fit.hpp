#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace biphoton {

// Interpolated full width at half maximum of sampled data (peak-referenced).
// Throws FitError if either half-crossing lies outside the sampled range.
double fwhm_interpolated(std::span<const double> x, std::span<const double> y);

struct LmOptions {
    int max_iterations = 200;
    double tolerance = 1e-10;  // relative parameter change
};

struct LmResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // sigma^2 * (J^T J)^-1
    double residual_rms = 0;
    int iterations = 0;
    bool converged = false;
};

// Levenberg-Marquardt with numeric (central-difference) Jacobian.
LmResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                             const Eigen::VectorXd& p0, const LmOptions& opt = {});

struct Gaussian1dFit {
    double amplitude = 0;
    double center = 0;
    double sigma = 0;
    double offset = 0;
    double fwhm = 0;
    double residual_rms = 0;
    bool converged = false;
};

Gaussian1dFit fit_gaussian_1d(std::span<const double> x, std::span<const double> y,
                              bool fit_offset = false);

// A * exp(-(qxx*dx^2 + 2*qxy*dx*dy + qyy*dy^2)), rotated elliptical Gaussian.
struct Gaussian2dFit {
    double amplitude = 0;
    double center_x = 0, center_y = 0;
    double qxx = 0, qxy = 0, qyy = 0;
    double fwhm_major = 0, fwhm_minor = 0;  // along principal axes
    double axis_major_x = 0, axis_major_y = 0;  // unit vector, major axis
    double residual_rms = 0;
    bool converged = false;
};

// core_fraction > 0 restricts the fit to cells >= that fraction of the peak
// (keeps side lobes out of the width estimate).
Gaussian2dFit fit_gaussian_2d(std::span<const double> x, std::span<const double> y,
                              const Eigen::MatrixXd& z, double core_fraction = 0.0);

}  // namespace biphoton
