#include "tunnelscope/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnelscope/errors.hpp"

namespace tunnelscope {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
    dx_ = (x_max - x_min) / static_cast<double>(n);
    dk_ = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx_);
    k_cutoff_ = std::numbers::pi / dx_;
    k_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<double>(j);
        k_[j] = (j < n / 2) ? dk_ * jj : dk_ * (jj - static_cast<double>(n));
    }
    plan_ = FftPlan::get(n);
}

std::size_t Grid1D::index_of(double x) const {
    double fi = std::round((x - x_min_) / dx_);
    if (fi < 0.0) return 0;
    if (fi >= static_cast<double>(n_)) return n_ - 1;
    return static_cast<std::size_t>(fi);
}

GridPtr make_grid(double x_min, double x_max, std::size_t n) {
    if (!(x_max > x_min)) {
        std::ostringstream os;
        os << "make_grid: degenerate extent [" << x_min << ", " << x_max << "]";
        throw ConfigError(os.str());
    }
    if (!is_power_of_two(n) || n < 16) {
        std::ostringstream os;
        os << "make_grid: n = " << n << " must be a power of two >= 16";
        throw ConfigError(os.str());
    }
    return std::make_shared<Grid1D>(x_min, x_max, n);
}

} // namespace tunnelscope
