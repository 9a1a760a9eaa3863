#include "biphoton/poling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <cstdio>
#include <vector>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton {

namespace {

struct Segment {
    double z0, z1;
    int sign;
};

// Collapse zero-length segments and merge equal-sign neighbours.
PolingDesign assemble(std::vector<Segment> segs, const char* kind, double period_m,
                      double length_m, std::vector<double> duty) {
    PolingDesign d;
    d.kind = kind;
    d.period_m = period_m;
    d.length_m = length_m;
    d.duty = std::move(duty);
    d.boundary_m.push_back(segs.front().z0);
    for (const auto& s : segs) {
        if (s.z1 <= s.z0) continue;
        if (!d.sign.empty() && s.sign == d.sign.back()) {
            d.boundary_m.back() = s.z1;
        } else {
            d.boundary_m.push_back(s.z1);
            d.sign.push_back(s.sign);
        }
    }
    d.boundary_m.front() = 0.0;
    d.boundary_m.back() = length_m;
    return d;
}

}  // namespace

double PolingDesign::qpm_k() const { return kTwoPi / period_m; }

void PolingDesign::validate() const {
    if (period_m <= 0 || length_m <= 0)
        throw std::invalid_argument("poling period and length must be positive");
    if (sign.size() + 1 != boundary_m.size() || sign.empty())
        throw std::invalid_argument("poling table is inconsistent");
    if (boundary_m.front() != 0.0 || std::abs(boundary_m.back() - length_m) > 1e-12 * length_m)
        throw std::invalid_argument("domains must tile [0, length]");
    for (size_t i = 0; i + 1 < boundary_m.size(); ++i)
        if (boundary_m[i + 1] <= boundary_m[i])
            throw std::invalid_argument("domain boundaries must be strictly increasing");
    for (size_t i = 0; i < sign.size(); ++i) {
        if (sign[i] != 1 && sign[i] != -1)
            throw std::invalid_argument("domain signs must be +1 or -1");
        if (i > 0 && sign[i] == sign[i - 1])
            throw std::invalid_argument("adjacent domains must alternate sign");
    }
}

bool PolingDesign::mirror_symmetric(double tol) const {
    const size_t n = sign.size();
    for (size_t j = 0; j < boundary_m.size(); ++j)
        if (std::abs(boundary_m[j] + boundary_m[boundary_m.size() - 1 - j] - length_m) >
            tol * length_m)
            return false;
    for (size_t j = 0; j < n; ++j)
        if (sign[j] != sign[n - 1 - j]) return false;
    return true;
}

PolingDesign uniform_poling(double period_um, double length_mm) {
    const double period = period_um * 1e-6;
    const double length = length_mm * 1e-3;
    if (period <= 0 || length <= 0)
        throw std::invalid_argument("poling period and length must be positive");
    if (length < period) throw std::invalid_argument("crystal shorter than one period");

    std::vector<Segment> segs;
    std::vector<double> duty;
    double z = 0;
    while (z < length - 1e-15) {
        const double ze = std::min(z + period, length);
        segs.push_back({z, std::min(z + period / 2, ze), 1});
        if (z + period / 2 < ze) segs.push_back({z + period / 2, ze, -1});
        duty.push_back(0.5);
        z = ze;
    }
    return assemble(std::move(segs), "uniform", period, length, std::move(duty));
}

PolingDesign apodized_poling(double period_um, double length_mm,
                             const ApodizationOptions& opt) {
    const double period = period_um * 1e-6;
    const double length = length_mm * 1e-3;
    if (period <= 0 || length <= 0)
        throw std::invalid_argument("poling period and length must be positive");
    if (!(opt.duty_min > 0 && opt.duty_min <= 0.5))
        throw std::invalid_argument("duty_min must lie in (0, 0.5]");
    if (!(opt.duty_max >= 0.5 && opt.duty_max < 1.0))
        throw std::invalid_argument("duty_max must lie in [0.5, 1)");
    if (std::abs((1.0 - opt.duty_max) - opt.duty_min) > 1e-12)
        throw std::invalid_argument("duty limits must be symmetric about 1/2");
    if (!(opt.envelope_edge > 0 && opt.envelope_edge < 1))
        throw std::invalid_argument("envelope_edge must lie in (0, 1)");

    const double amin = std::sin(kPi * opt.duty_min);
    const double sigma = (length / 2) / std::sqrt(2.0 * std::log(1.0 / opt.envelope_edge));

    // Right half on a period lattice anchored at the crystal center; the
    // positive block is centered in its period so the first-order Fourier
    // coefficient stays real (amplitude sin(pi*D)). Error diffusion keeps
    // the local average on the Gaussian envelope once the target drops
    // below the sin(pi*duty_min) floor; sign flips carry negative residue.
    std::vector<Segment> half;
    std::vector<double> duty_half;
    double z = length / 2;
    double err = 0;
    while (z < length - 1e-15) {
        const double ze = std::min(z + period, length);
        const double zc = z + period / 2;
        const double g = std::exp(-(zc - length / 2) * (zc - length / 2) / (2 * sigma * sigma));
        const double t = g + err;
        double a;
        if (std::abs(t) >= amin)
            a = std::clamp(t, -1.0, 1.0);
        else
            a = (t >= 0) ? amin : -amin;
        err = t - a;
        const double duty =
            std::clamp(std::asin(std::abs(a)) / kPi, opt.duty_min, 0.5);
        const int s0 = (a >= 0) ? 1 : -1;
        const double aa = z + (1 - duty) / 2 * period;
        const double bb = aa + duty * period;
        half.push_back({z, std::min(aa, ze), -s0});
        if (aa < ze) half.push_back({aa, std::min(bb, ze), s0});
        if (bb < ze) half.push_back({bb, ze, -s0});
        duty_half.push_back(s0 > 0 ? duty : 1.0 - duty);
        z = ze;
    }

    // Mirror for exact symmetry about length/2.
    std::vector<Segment> segs;
    segs.reserve(2 * half.size());
    for (auto it = half.rbegin(); it != half.rend(); ++it)
        segs.push_back({length - it->z1, length - it->z0, it->sign});
    segs.insert(segs.end(), half.begin(), half.end());

    std::vector<double> duty_all(duty_half.rbegin(), duty_half.rend());
    duty_all.insert(duty_all.end(), duty_half.begin(), duty_half.end());

    return assemble(std::move(segs), "apodized", period, length, std::move(duty_all));
}

std::complex<double> phase_matching_amplitude(const PolingDesign& design, double k) {
    const double L = design.length_m;
    const size_t n = design.sign.size();
    if (std::abs(k) * L < 1e-12) {
        // removable singularity: phi -> sum sign_m * len_m / L
        double acc = 0;
        for (size_t m = 0; m < n; ++m)
            acc += design.sign[m] * (design.boundary_m[m + 1] - design.boundary_m[m]);
        return {acc / L, 0.0};
    }
    std::complex<double> acc = 0;
    for (size_t m = 0; m < n; ++m) {
        const std::complex<double> e1 = std::polar(1.0, k * design.boundary_m[m + 1]);
        const std::complex<double> e0 = std::polar(1.0, k * design.boundary_m[m]);
        acc += static_cast<double>(design.sign[m]) * (e1 - e0);
    }
    return acc / (std::complex<double>(0.0, 1.0) * k * L);
}

void phase_matching_batch(const PolingDesign& design, std::span<const double> k,
                          std::span<std::complex<double>> out, bool centered) {
    const double L = design.length_m;
    const size_t n = design.sign.size();
    const double shift = centered ? L / 2 : 0.0;

    // Telescope the domain sum to one term per boundary:
    //   sum_m s_m (E_{m+1} - E_m) = sum_j c_j E_j,
    //   c_0 = -s_0, c_j = s_{j-1} - s_j, c_n = s_{n-1}.
    std::vector<double> zb(n + 1), w(n + 1);
    for (size_t j = 0; j <= n; ++j) zb[j] = design.boundary_m[j] - shift;
    w[0] = -design.sign[0];
    for (size_t j = 1; j < n; ++j) w[j] = design.sign[j - 1] - design.sign[j];
    w[n] = design.sign[n - 1];

    kernels::cis_sum(zb, w, k, out);
    for (size_t i = 0; i < k.size(); ++i) {
        if (std::abs(k[i]) * L < 1e-12) {
            out[i] = phase_matching_amplitude(design, k[i]);
        } else {
            out[i] /= std::complex<double>(0.0, 1.0) * k[i] * L;
        }
    }
}

double phase_matching_fwhm_nu(const PolingDesign& design, double delta) {
    if (delta == 0) throw std::invalid_argument("delta must be nonzero");
    const double k0 = design.qpm_k();
    double halfwidth_k = 20.0 * kPi / design.length_m;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const int pts = 4001;
        std::vector<double> k(pts), inten(pts);
        std::vector<std::complex<double>> phi(pts);
        for (int i = 0; i < pts; ++i)
            k[i] = k0 - halfwidth_k + 2.0 * halfwidth_k * i / (pts - 1);
        phase_matching_batch(design, k, phi);
        for (int i = 0; i < pts; ++i) inten[i] = std::norm(phi[i]);
        const auto pk = std::max_element(inten.begin(), inten.end());
        const double half = *pk / 2;
        int ip = static_cast<int>(pk - inten.begin());
        int l = ip, r = ip;
        while (l > 0 && inten[l] > half) --l;
        while (r < pts - 1 && inten[r] > half) ++r;
        if (l == 0 || r == pts - 1) {
            halfwidth_k *= 4;
            continue;
        }
        auto cross = [&](int a, int b) {
            return k[a] + (half - inten[a]) * (k[b] - k[a]) / (inten[b] - inten[a]);
        };
        const double width_k = cross(r - 1, r) - cross(l + 1, l);
        return width_k / std::abs(delta);
    }
    throw CalibrationError("phase-matching response wider than the scan window");
}

void save_domain_table(std::ostream& os, const PolingDesign& design) {
    char buf[96];
    os << "# poling domain table\n";
    os << "# kind " << design.kind << "\n";
    std::snprintf(buf, sizeof buf, "# period_um %.17g\n", design.period_m * 1e6);
    os << buf;
    std::snprintf(buf, sizeof buf, "# length_mm %.17g\n", design.length_m * 1e3);
    os << buf;
    os << "# columns: z_start_um z_end_um sign\n";
    for (size_t m = 0; m < design.sign.size(); ++m) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %+d\n", design.boundary_m[m] * 1e6,
                      design.boundary_m[m + 1] * 1e6, design.sign[m]);
        os << buf;
    }
}

PolingDesign load_domain_table(std::istream& is) {
    PolingDesign d;
    d.kind = "imported";
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first == "#") {
            std::string key;
            if (ss >> key) {
                double v;
                if (key == "period_um" && ss >> v) d.period_m = v * 1e-6;
                if (key == "length_mm" && ss >> v) d.length_m = v * 1e-3;
                if (key == "kind") ss >> d.kind;
            }
            continue;
        }
        double z0, z1;
        int s;
        std::istringstream rec(line);
        if (!(rec >> z0 >> z1 >> s)) throw ParseError("malformed domain record", line_no);
        if (d.sign.empty()) d.boundary_m.push_back(z0 * 1e-6);
        if (std::abs(z0 * 1e-6 - d.boundary_m.back()) > 1e-12)
            throw ParseError("domains are not contiguous", line_no);
        d.boundary_m.push_back(z1 * 1e-6);
        d.sign.push_back(s);
    }
    if (d.sign.empty()) throw EmptyDataError("domain table holds no domains");
    if (d.length_m == 0) d.length_m = d.boundary_m.back();
    if (d.period_m == 0) throw ParseError("domain table misses the period header");
    d.validate();
    return d;
}

}  // namespace biphoton
