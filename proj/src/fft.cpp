#include "ambise/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ambise::fft {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is, provided the plan itself is never modified. Plans are
// created once per size with FFTW_UNALIGNED so they accept any buffer.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan forward(std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = fwd_.find(n);
        if (it != fwd_.end()) return it->second;
        std::vector<double> in(n, 0.0);
        std::vector<std::complex<double>> out(n / 2 + 1);
        fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                           reinterpret_cast<fftw_complex*>(out.data()),
                                           FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw: failed to create r2c plan");
        fwd_.emplace(n, p);
        return p;
    }

    fftw_plan inverse(std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = inv_.find(n);
        if (it != inv_.end()) return it->second;
        std::vector<std::complex<double>> in(n / 2 + 1);
        std::vector<double> out(n, 0.0);
        fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                           reinterpret_cast<fftw_complex*>(in.data()),
                                           out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw: failed to create c2r plan");
        inv_.emplace(n, p);
        return p;
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> fwd_;
    std::map<std::size_t, fftw_plan> inv_;
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n) {
    if (n == 0) throw std::invalid_argument("rfft: n must be positive");
    std::vector<double> in(n, 0.0);
    const std::size_t m = std::min(n, x.size());
    std::memcpy(in.data(), x.data(), m * sizeof(double));
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(PlanCache::instance().forward(n), in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
    if (n == 0) throw std::invalid_argument("irfft: n must be positive");
    if (bins.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: expected n/2+1 bins");
    // c2r destroys its input, so work on a copy.
    std::vector<std::complex<double>> in(bins.begin(), bins.end());
    std::vector<double> out(n, 0.0);
    fftw_execute_dft_c2r(PlanCache::instance().inverse(n),
                         reinterpret_cast<fftw_complex*>(in.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace ambise::fft
