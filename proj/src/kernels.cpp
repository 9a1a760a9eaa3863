#include "biphoton/kernels.hpp"

#include <atomic>
#include <cmath>
#include <vector>

namespace biphoton::kernels {

#if defined(__x86_64__) || defined(_M_X64)
void cis_sum_avx2(std::span<const double> z, std::span<const double> w,
                  std::span<const double> k, std::span<std::complex<double>> out);
#endif

namespace {

void cis_sum_scalar(std::span<const double> z, std::span<const double> w,
                    std::span<const double> k, std::span<std::complex<double>> out) {
    const size_t n = z.size();
    for (size_t i = 0; i < k.size(); ++i) {
        double re = 0, im = 0;
        const double ki = k[i];
        for (size_t j = 0; j < n; ++j) {
            const double ph = ki * z[j];
            re += w[j] * std::cos(ph);
            im += w[j] * std::sin(ph);
        }
        out[i] = {re, im};
    }
}

std::atomic<Backend> g_backend{detect_backend()};

}  // namespace

Backend detect_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Backend::avx2;
#endif
    return Backend::scalar;
}

Backend active_backend() { return g_backend.load(); }

bool set_backend(Backend b) {
    if (b == Backend::avx2 && detect_backend() != Backend::avx2) return false;
    g_backend.store(b);
    return true;
}

void cis_sum(std::span<const double> z, std::span<const double> w,
             std::span<const double> k, std::span<std::complex<double>> out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend.load() == Backend::avx2) {
        cis_sum_avx2(z, w, k, out);
        return;
    }
#endif
    cis_sum_scalar(z, w, k, out);
}

void cis_sum_complex(std::span<const double> z, std::span<const double> wre,
                     std::span<const double> wim, std::span<const double> k,
                     std::span<std::complex<double>> out) {
    cis_sum(z, wre, k, out);
    std::vector<std::complex<double>> tmp(out.size());
    cis_sum(z, wim, k, tmp);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] += std::complex<double>(-tmp[i].imag(), tmp[i].real());
}

}  // namespace biphoton::kernels
