#include "sde/fbm.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <fftw3.h>

namespace tempo::sde {

namespace {

double fgn_autocov(int64_t k, double hurst) {
    const double a = std::abs(double(k));
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) +
                  std::pow(std::abs(a - 1.0), h2));
}

} // namespace

std::vector<double> fbm_increments(Rng& rng, size_t length, double hurst,
                                   double dt, size_t max_length) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("Hurst exponent must be in (0, 1)");
    if (length > max_length)
        throw std::invalid_argument("fbm_increments: length " + std::to_string(length) +
                                    " exceeds bound " + std::to_string(max_length));
    if (length == 0) return {};
    const double scale = std::pow(dt, hurst);
    if (length == 1) return {scale * rng.normal()};

    // circulant embedding of the fGn covariance
    size_t m = 1;
    while (m < length) m <<= 1;
    const size_t n2 = 2 * m;
    std::vector<std::complex<double>> c(n2);
    for (size_t k = 0; k <= m; ++k) c[k] = fgn_autocov(int64_t(k), hurst);
    for (size_t k = m + 1; k < n2; ++k) c[k] = c[n2 - k];

    std::vector<std::complex<double>> lambda(n2);
    fftw_plan plan = fftw_plan_dft_1d(
        int(n2), reinterpret_cast<fftw_complex*>(c.data()),
        reinterpret_cast<fftw_complex*>(lambda.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<std::complex<double>> v(n2);
    {
        const double l0 = std::max(0.0, lambda[0].real());
        const double lm = std::max(0.0, lambda[m].real());
        v[0] = std::sqrt(l0) * rng.normal();
        v[m] = std::sqrt(lm) * rng.normal();
        for (size_t k = 1; k < m; ++k) {
            const double lk = std::max(0.0, lambda[k].real());
            const double s = std::sqrt(lk / 2.0);
            const std::complex<double> z(s * rng.normal(), s * rng.normal());
            v[k] = z;
            v[n2 - k] = std::conj(z);
        }
    }

    std::vector<std::complex<double>> w(n2);
    plan = fftw_plan_dft_1d(int(n2), reinterpret_cast<fftw_complex*>(v.data()),
                            reinterpret_cast<fftw_complex*>(w.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<double> out(length);
    const double norm = 1.0 / std::sqrt(double(n2));
    for (size_t i = 0; i < length; ++i) out[i] = scale * norm * w[i].real();
    return out;
}

} // namespace tempo::sde
