#ifndef TUNNELSCOPE_GRID_HPP
#define TUNNELSCOPE_GRID_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "tunnelscope/fft.hpp"

namespace tunnelscope {

// Uniform periodic lattice x_i = x_min + i*dx, i = 0..n-1, with the paired
// FFT-ordered momentum lattice k_j = 2*pi*j/(n*dx) for j < n/2 and
// 2*pi*(j-n)/(n*dx) for j >= n/2 (spacing 2*pi/(n*dx), span +-pi/dx).
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t n() const { return n_; }
    double dx() const { return dx_; }
    double dk() const { return dk_; }
    double k_cutoff() const { return k_cutoff_; }  // Nyquist magnitude pi/dx

    double x(std::size_t i) const { return x_min_ + dx_ * static_cast<double>(i); }
    const std::vector<double>& k_values() const { return k_; }
    const FftPlan& fft() const { return *plan_; }

    // Nearest grid index to x, clamped to [0, n-1].
    std::size_t index_of(double x) const;

    bool same_as(const Grid1D& other) const {
        return n_ == other.n_ && x_min_ == other.x_min_ && x_max_ == other.x_max_;
    }

private:
    double x_min_, x_max_, dx_, dk_, k_cutoff_;
    std::size_t n_;
    std::vector<double> k_;
    std::shared_ptr<const FftPlan> plan_;
};

using GridPtr = std::shared_ptr<const Grid1D>;

// pre: x_max > x_min, n a power of two >= 16
GridPtr make_grid(double x_min, double x_max, std::size_t n);

} // namespace tunnelscope

#endif
