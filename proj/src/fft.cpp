#include "tunnelscope/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace tunnelscope {

bool is_power_of_two(std::size_t n) {
    return n >= 1 && (n & (n - 1)) == 0;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
    bitrev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        bitrev_[i] = r;
    }
    // Twiddles for stage of half-length m: m = 1, 2, 4, ..., n/2, packed
    // consecutively; total n-1 entries.
    twiddle_.reserve(n - 1);
    for (std::size_t m = 1; m < n; m <<= 1) {
        for (std::size_t j = 0; j < m; ++j) {
            double ang = -std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
            twiddle_.emplace_back(std::cos(ang), std::sin(ang));
        }
    }
    twiddle_inv_.reserve(twiddle_.size());
    for (const auto& w : twiddle_) twiddle_inv_.push_back(std::conj(w));
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t n) {
    if (!is_power_of_two(n) || n < 2)
        throw std::invalid_argument("FftPlan: size must be a power of two >= 2");
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto plan = std::shared_ptr<const FftPlan>(new FftPlan(n));
    cache.emplace(n, plan);
    return plan;
}

void FftPlan::transform(std::complex<double>* a, bool inverse) const {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = bitrev_[i];
        if (r > i) std::swap(a[i], a[r]);
    }
    const std::complex<double>* tw = inverse ? twiddle_inv_.data() : twiddle_.data();
    std::size_t toff = 0;
    for (std::size_t m = 1; m < n; m <<= 1) {
        const std::size_t step = m << 1;
        for (std::size_t k = 0; k < n; k += step) {
            for (std::size_t j = 0; j < m; ++j) {
                const std::complex<double> w = tw[toff + j];
                std::complex<double>& u = a[k + j];
                std::complex<double>& v = a[k + j + m];
                const std::complex<double> t = w * v;
                v = u - t;
                u += t;
            }
        }
        toff += m;
    }
}

void FftPlan::forward(std::complex<double>* data) const {
    transform(data, false);
}

void FftPlan::inverse(std::complex<double>* data) const {
    transform(data, true);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) data[i] *= inv;
}

} // namespace tunnelscope
