#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Hot reduction kernels. Scalar reference implementations plus AVX2
// variants selected at runtime; both must agree to ~1e-12 relative.
namespace biphoton::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();

// Force a backend (used by equivalence tests). Returns false if the
// requested backend is not supported on this machine.
bool set_backend(Backend b);

// Best backend the CPU supports.
Backend detect_backend();

// out[i] = sum_j w[j] * exp(i * k[i] * z[j])   (w real)
void cis_sum(std::span<const double> z, std::span<const double> w,
             std::span<const double> k, std::span<std::complex<double>> out);

// Complex weights: out[i] = sum_j (wre[j] + i*wim[j]) * exp(i * k[i] * z[j])
void cis_sum_complex(std::span<const double> z, std::span<const double> wre,
                     std::span<const double> wim, std::span<const double> k,
                     std::span<std::complex<double>> out);

}  // namespace biphoton::kernels
