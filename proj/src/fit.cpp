#include "biphoton/fit.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

double fwhm_interpolated(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fwhm needs matching axes with >= 3 samples");
    const auto pk = std::max_element(y.begin(), y.end());
    const double half = *pk / 2;
    if (*pk <= 0) throw FitError("fwhm of non-positive data");
    const long ip = pk - y.begin();
    long l = ip, r = ip;
    while (l > 0 && y[l] > half) --l;
    while (r + 1 < static_cast<long>(y.size()) && y[r] > half) ++r;
    if (y[l] > half || y[r] > half)
        throw FitError("half maximum not reached inside the sampled range");
    auto cross = [&](long a, long b) {
        return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    };
    return std::abs(cross(r - 1, r) - cross(l + 1, l));
}

LmResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                             const Eigen::VectorXd& p0, const LmOptions& opt) {
    LmResult out;
    Eigen::VectorXd p = p0;
    Eigen::VectorXd r = residual(p);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    const int np = static_cast<int>(p.size());
    const int nr = static_cast<int>(r.size());
    Eigen::MatrixXd J(nr, np);

    for (out.iterations = 1; out.iterations <= opt.max_iterations; ++out.iterations) {
        for (int j = 0; j < np; ++j) {
            const double h = std::max(1e-7 * std::abs(p[j]), 1e-12);
            Eigen::VectorXd pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            J.col(j) = (residual(pp) - residual(pm)) / (2 * h);
        }
        const Eigen::MatrixXd jtj = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;

        bool stepped = false;
        for (int tries = 0; tries < 30 && !stepped; ++tries) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
            const Eigen::VectorXd step = a.ldlt().solve(g);
            const Eigen::VectorXd pn = p - step;
            const Eigen::VectorXd rn = residual(pn);
            const double cn = rn.squaredNorm();
            if (cn < cost && std::isfinite(cn)) {
                const double rel = step.norm() / std::max(p.norm(), 1e-30);
                p = pn;
                r = rn;
                cost = cn;
                lambda = std::max(lambda / 3, 1e-14);
                stepped = true;
                if (rel < opt.tolerance) {
                    out.converged = true;
                }
            } else {
                lambda *= 10;
            }
        }
        if (out.converged || !stepped) {
            if (!stepped) out.converged = true;  // stalled at a minimum
            break;
        }
    }

    out.params = p;
    const int dof = std::max(nr - np, 1);
    const double sigma2 = cost / dof;
    Eigen::MatrixXd jtj = J.transpose() * J;
    out.covariance = sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    out.residual_rms = std::sqrt(cost / nr);
    return out;
}

Gaussian1dFit fit_gaussian_1d(std::span<const double> x, std::span<const double> y,
                              bool fit_offset) {
    if (x.size() != y.size() || x.size() < 5)
        throw std::invalid_argument("gaussian fit needs matching axes with >= 5 samples");
    const int n = static_cast<int>(x.size());

    double b0 = fit_offset ? *std::min_element(y.begin(), y.end()) : 0.0;
    const auto pk = std::max_element(y.begin(), y.end());
    double a0 = *pk - b0;
    double c0 = x[pk - y.begin()];
    double m0 = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double wgt = std::max(y[i] - b0, 0.0);
        m0 += wgt;
        m1 += wgt * x[i];
        m2 += wgt * x[i] * x[i];
    }
    if (m0 <= 0 || a0 <= 0) throw FitError("gaussian fit on non-positive data");
    const double mean = m1 / m0;
    double s0 = std::sqrt(std::max(m2 / m0 - mean * mean, 1e-30));

    Eigen::VectorXd p0(fit_offset ? 4 : 3);
    p0[0] = a0;
    p0[1] = c0;
    p0[2] = s0;
    if (fit_offset) p0[3] = b0;
    auto model = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        const double off = fit_offset ? p[3] : 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = (x[i] - p[1]) / p[2];
            r[i] = p[0] * std::exp(-0.5 * d * d) + off - y[i];
        }
        return r;
    };
    LmResult lm = levenberg_marquardt(model, p0);
    if (!lm.converged) throw FitError("gaussian fit did not converge");

    Gaussian1dFit out;
    out.amplitude = lm.params[0];
    out.center = lm.params[1];
    out.sigma = std::abs(lm.params[2]);
    out.offset = fit_offset ? lm.params[3] : 0.0;
    out.fwhm = kFwhmPerSigma * out.sigma;
    out.residual_rms = lm.residual_rms;
    out.converged = true;
    return out;
}

Gaussian2dFit fit_gaussian_2d(std::span<const double> x, std::span<const double> y,
                              const Eigen::MatrixXd& z, double core_fraction) {
    const int nx = static_cast<int>(x.size());
    const int ny = static_cast<int>(y.size());
    if (z.rows() != nx || z.cols() != ny || nx < 5 || ny < 5)
        throw std::invalid_argument("2d gaussian fit needs matching axes with >= 5 samples");
    if (core_fraction < 0 || core_fraction >= 1)
        throw std::invalid_argument("core fraction must lie in [0, 1)");

    double peak = z.maxCoeff();
    if (peak <= 0) throw FitError("2d gaussian fit on non-positive data");

    // fit in unit-scaled coordinates: the LM finite-difference steps assume
    // O(1) parameters, and raw detuning axes put the quadratic coefficients
    // tens of orders of magnitude below that
    const double x0 = 0.5 * (x[0] + x[nx - 1]);
    const double y0 = 0.5 * (y[0] + y[ny - 1]);
    const double sx = std::max(std::abs(x[nx - 1] - x[0]) / 2, 1e-300);
    const double sy = std::max(std::abs(y[ny - 1] - y[0]) / 2, 1e-300);
    std::vector<double> xs(nx), ys(ny);
    for (int i = 0; i < nx; ++i) xs[i] = (x[i] - x0) / sx;
    for (int j = 0; j < ny; ++j) ys[j] = (y[j] - y0) / sy;

    // core cells only: keeps side lobes from biasing the width estimate
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (z(i, j) >= core_fraction * peak) cells.emplace_back(i, j);
    if (cells.size() < 6) throw FitError("2d gaussian fit core has too few samples");

    // moments over everything (truncated moments start LM too narrow)
    double m0 = 0, mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double wgt = std::max(z(i, j), 0.0);
            m0 += wgt;
            mx += wgt * xs[i];
            my += wgt * ys[j];
        }
    mx /= m0;
    my /= m0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double wgt = std::max(z(i, j), 0.0);
            mxx += wgt * (xs[i] - mx) * (xs[i] - mx);
            myy += wgt * (ys[j] - my) * (ys[j] - my);
            mxy += wgt * (xs[i] - mx) * (ys[j] - my);
        }
    mxx /= m0;
    myy /= m0;
    mxy /= m0;
    Eigen::Matrix2d cov;
    cov << mxx, mxy, mxy, myy;
    const Eigen::Matrix2d q0 = 0.5 * cov.inverse();

    Eigen::VectorXd p0(6);
    p0 << 1.0, mx, my, q0(0, 0), q0(0, 1), q0(1, 1);
    auto model = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<long>(cells.size()));
        long idx = 0;
        for (const auto& [i, j] : cells) {
            const double dx = xs[i] - p[1];
            const double dy = ys[j] - p[2];
            const double e = p[3] * dx * dx + 2 * p[4] * dx * dy + p[5] * dy * dy;
            r[idx++] = p[0] * std::exp(-e) - z(i, j) / peak;
        }
        return r;
    };
    LmResult lm = levenberg_marquardt(model, p0);
    if (!lm.converged) throw FitError("2d gaussian fit did not converge");

    Gaussian2dFit out;
    out.amplitude = lm.params[0] * peak;
    out.center_x = x0 + sx * lm.params[1];
    out.center_y = y0 + sy * lm.params[2];
    out.qxx = lm.params[3] / (sx * sx);
    out.qxy = lm.params[4] / (sx * sy);
    out.qyy = lm.params[5] / (sy * sy);
    Eigen::Matrix2d q;
    q << out.qxx, out.qxy, out.qxy, out.qyy;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
    const double q_minor = es.eigenvalues()[1];  // larger q = narrower axis
    const double q_major = es.eigenvalues()[0];
    if (q_major <= 0 || q_minor <= 0) throw FitError("2d gaussian fit is not elliptical");
    // exp(-q d^2) = 1/2  =>  half width sqrt(ln2/q)
    out.fwhm_major = 2 * std::sqrt(kLn2 / q_major);
    out.fwhm_minor = 2 * std::sqrt(kLn2 / q_minor);
    out.axis_major_x = es.eigenvectors()(0, 0);
    out.axis_major_y = es.eigenvectors()(1, 0);
    out.residual_rms = lm.residual_rms * peak;
    out.converged = true;
    return out;
}

}  // namespace biphoton
