// AVX2+FMA variant of the reduction kernels. Compiled with -mavx2 -mfma
// in this translation unit only; callers dispatch at runtime.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <complex>
#include <span>

namespace biphoton::kernels {

namespace {

// 4-wide sin/cos. Cody-Waite 3-word pi/2 reduction (fdlibm words) keeps
// ~1e-15 absolute accuracy for the |x| < ~1e5 rad arguments we see here;
// polynomials are the cephes minimax fits on [-pi/4, pi/4].
inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d two_over_pi = _mm256_set1_pd(0.63661977236758134308);
    const __m256d pio2_1 = _mm256_set1_pd(1.57079632673412561417e+00);
    const __m256d pio2_2 = _mm256_set1_pd(6.07710050650619224932e-11);
    const __m256d pio2_3 = _mm256_set1_pd(2.02226624879595063154e-21);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, two_over_pi),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, pio2_1, x);
    r = _mm256_fnmadd_pd(n, pio2_2, r);
    r = _mm256_fnmadd_pd(n, pio2_3, r);

    // quadrant = n mod 4 in {0,1,2,3}
    const __m256d quarter = _mm256_set1_pd(0.25);
    const __m256d four = _mm256_set1_pd(4.0);
    __m256d q = _mm256_sub_pd(n, _mm256_mul_pd(four, _mm256_floor_pd(_mm256_mul_pd(n, quarter))));

    const __m256d r2 = _mm256_mul_pd(r, r);

    __m256d sp = _mm256_set1_pd(1.58962301576546568060e-10);
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(-2.50507477628578072866e-8));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(2.75573136213857245213e-6));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(-1.98412698295895385996e-4));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(8.33333333332211858878e-3));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(-1.66666666666666307295e-1));
    __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(sp, r2), r, r);

    __m256d cp = _mm256_set1_pd(-1.13585365213876817300e-11);
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(2.08757008419747316778e-9));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(-2.75573141792967388112e-7));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(2.48015872888517179954e-5));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(-1.38888888888730564116e-3));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(4.16666666666665929218e-2));
    __m256d cr = _mm256_fmadd_pd(_mm256_mul_pd(cp, r2), r2,
                                 _mm256_fnmadd_pd(_mm256_set1_pd(0.5), r2, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d three = _mm256_set1_pd(3.0);
    __m256d q1 = _mm256_cmp_pd(q, one, _CMP_EQ_OQ);
    __m256d q2 = _mm256_cmp_pd(q, two, _CMP_EQ_OQ);
    __m256d q3 = _mm256_cmp_pd(q, three, _CMP_EQ_OQ);

    __m256d swap = _mm256_or_pd(q1, q3);
    __m256d s = _mm256_blendv_pd(sr, cr, swap);
    __m256d c = _mm256_blendv_pd(cr, sr, swap);

    const __m256d signbit = _mm256_set1_pd(-0.0);
    __m256d s_neg = _mm256_and_pd(_mm256_or_pd(q2, q3), signbit);
    __m256d c_neg = _mm256_and_pd(_mm256_or_pd(q1, q2), signbit);
    s_out = _mm256_xor_pd(s, s_neg);
    c_out = _mm256_xor_pd(c, c_neg);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

void cis_sum_avx2(std::span<const double> z, std::span<const double> w,
                  std::span<const double> k, std::span<std::complex<double>> out) {
    const size_t n = z.size();
    const size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < k.size(); ++i) {
        const double ki = k[i];
        const __m256d kv = _mm256_set1_pd(ki);
        __m256d re = _mm256_setzero_pd();
        __m256d im = _mm256_setzero_pd();
        for (size_t j = 0; j < n4; j += 4) {
            __m256d zv = _mm256_loadu_pd(z.data() + j);
            __m256d wv = _mm256_loadu_pd(w.data() + j);
            __m256d s, c;
            sincos4(_mm256_mul_pd(kv, zv), s, c);
            re = _mm256_fmadd_pd(wv, c, re);
            im = _mm256_fmadd_pd(wv, s, im);
        }
        double re_s = hsum(re), im_s = hsum(im);
        for (size_t j = n4; j < n; ++j) {
            const double ph = ki * z[j];
            re_s += w[j] * std::cos(ph);
            im_s += w[j] * std::sin(ph);
        }
        out[i] = {re_s, im_s};
    }
}

}  // namespace biphoton::kernels

#endif
