#ifndef TUNNELSCOPE_FFT_HPP
#define TUNNELSCOPE_FFT_HPP

#include <complex>
#include <memory>
#include <vector>

namespace tunnelscope {

// Radix-2 in-place FFT with precomputed twiddles. Execution is const and
// thread-safe; plans are cached per size behind a mutex. Kept in-tree so
// results are bit-reproducible across runs and machines, and so parallel
// trajectory workers need no planner locking.
class FftPlan {
public:
    // n must be a power of two, n >= 2.
    static std::shared_ptr<const FftPlan> get(std::size_t n);

    // X_k = sum_j x_j exp(-2*pi*i*j*k/n)
    void forward(std::complex<double>* data) const;
    // x_j = (1/n) sum_k X_k exp(+2*pi*i*j*k/n)
    void inverse(std::complex<double>* data) const;

    std::size_t size() const { return n_; }

private:
    explicit FftPlan(std::size_t n);
    void transform(std::complex<double>* data, bool inverse) const;

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;      // forward, packed per stage
    std::vector<std::complex<double>> twiddle_inv_;  // conjugates
};

bool is_power_of_two(std::size_t n);

} // namespace tunnelscope

#endif
