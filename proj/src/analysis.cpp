#include "tunnelscope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnelscope/errors.hpp"

namespace tunnelscope {

double kappa(double v0, double e, const UnitSystem& units) {
    if (!(v0 > e) || e < 0.0) {
        std::ostringstream os;
        os << "kappa: requires v0 > e >= 0, got v0 = " << v0 << ", e = " << e;
        throw ConfigError(os.str());
    }
    return std::sqrt(2.0 * units.mass * (v0 - e)) / units.hbar;
}

BoundReport bound_chain(double v0, double e, double delta_l,
                        const UnitSystem& units) {
    if (!(delta_l > 0.0)) throw ConfigError("bound_chain: delta_l must be > 0");
    BoundReport r;
    r.v0 = v0;
    r.e = e;
    r.delta_l = delta_l;
    r.kappa = kappa(v0, e, units);
    r.decay_length = 1.0 / r.kappa;
    r.resolution_limit = r.decay_length;
    r.barrier_deficit = v0 - e;
    r.energy_uncertainty_floor =
        units.hbar * units.hbar * r.kappa * r.kappa / (2.0 * units.mass);
    r.momentum_uncertainty = units.hbar / (2.0 * delta_l);
    r.dwell_time = 2.0 * units.mass * delta_l * delta_l / units.hbar;
    r.dwell_time_limit =
        2.0 * units.mass / (units.hbar * r.kappa * r.kappa);
    r.energy_floor = units.hbar / r.dwell_time;
    r.resolution_ok = delta_l < r.decay_length;
    // Resolving the decay length caps the dwell time, which floors the
    // energy uncertainty at the barrier deficit.
    r.chain_holds = !(r.dwell_time < r.dwell_time_limit) ||
                    r.energy_floor > r.energy_uncertainty_floor * (1.0 - 1e-12);
    return r;
}

double rect_transmission_analytic(double e, double v0, double d,
                                  const UnitSystem& units) {
    if (!(e > 0.0)) throw ConfigError("rect_transmission_analytic: e must be > 0");
    if (!(v0 > 0.0)) throw ConfigError("rect_transmission_analytic: v0 must be > 0");
    if (d < 0.0) throw ConfigError("rect_transmission_analytic: d must be >= 0");
    if (d == 0.0) return 1.0;
    const double m = units.mass, hbar = units.hbar;
    // Crossover window where both branches degenerate to the e = v0 limit.
    const double eps = 1e-9 * v0;
    if (std::abs(e - v0) <= eps) {
        return 1.0 / (1.0 + m * v0 * d * d / (2.0 * hbar * hbar));
    }
    if (e < v0) {
        const double k = std::sqrt(2.0 * m * (v0 - e)) / hbar;
        const double s = std::sinh(k * d);
        return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (v0 - e)));
    }
    const double k = std::sqrt(2.0 * m * (e - v0)) / hbar;
    const double s = std::sin(k * d);
    return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (e - v0)));
}

double wkb_decay_rate(std::span<const double> v, const Grid1D& grid, double e,
                      const BarrierRegion& trap_region, const UnitSystem& units) {
    const std::size_t n = grid.n();
    if (v.size() != n) throw ConfigError("wkb_decay_rate: potential does not match grid");
    const std::size_t lo = grid.index_of(trap_region.x_left);
    const std::size_t hi = grid.index_of(trap_region.x_right);
    if (lo + 4 >= hi) throw ConfigError("wkb_decay_rate: trap region too small");

    std::size_t imin = lo;
    for (std::size_t i = lo; i <= hi; ++i)
        if (v[i] < v[imin]) imin = i;
    if (!(v[imin] < e))
        throw ConfigError("wkb_decay_rate: energy lies below the well bottom");

    // omega from a least-squares parabola over +-2 points at the minimum.
    if (imin < 2 || imin + 2 >= n)
        throw ConfigError("wkb_decay_rate: well minimum too close to the grid edge");
    double sxx = 0.0, sxxxx = 0.0, sxxy = 0.0, sy = 0.0;
    for (int o = -2; o <= 2; ++o) {
        const double x = static_cast<double>(o) * grid.dx();
        const double y = v[imin + o];
        sxx += x * x;
        sxxxx += x * x * x * x;
        sxxy += x * x * y;
        sy += y;
    }
    // y = a x^2 + c over the symmetric stencil (odd terms drop out).
    const double denom = 5.0 * sxxxx - sxx * sxx;
    const double a = (5.0 * sxxy - sxx * sy) / denom;
    if (!(a > 0.0))
        throw ConfigError("wkb_decay_rate: no harmonic curvature at the well minimum");
    const double omega = std::sqrt(2.0 * a / units.mass);

    // Forbidden span: first interval beyond the minimum where V > e that
    // comes back down below e (the open side). Try right, then left.
    auto action_integral = [&](bool rightward) -> double {
        const std::ptrdiff_t step = rightward ? 1 : -1;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(imin);
        const std::ptrdiff_t end = rightward ? static_cast<std::ptrdiff_t>(n) - 1 : 0;
        while (i != end && v[static_cast<std::size_t>(i)] <= e) i += step;
        if (i == end) return -1.0;  // never enters a forbidden span
        double integral = 0.0;
        double prev_kappa = 0.0;  // value at the turning point
        while (i != end && v[static_cast<std::size_t>(i)] > e) {
            const double k =
                std::sqrt(2.0 * units.mass * (v[static_cast<std::size_t>(i)] - e)) /
                units.hbar;
            integral += 0.5 * (prev_kappa + k) * grid.dx();
            prev_kappa = k;
            i += step;
        }
        if (v[static_cast<std::size_t>(i)] > e) return -1.0;  // wall never opens
        integral += 0.5 * prev_kappa * grid.dx();
        return integral;
    };

    double integral = action_integral(true);
    if (integral < 0.0) integral = action_integral(false);
    if (integral < 0.0)
        throw ConfigError("wkb_decay_rate: no outer turning point found (energy above "
                          "the barrier top, or the well does not open)");
    return omega / (2.0 * std::numbers::pi) * std::exp(-2.0 * integral);
}

DecayFit fit_exponential_decay(std::span<const std::pair<double, double>> survival,
                               double skip_fraction) {
    if (survival.size() < 8)
        throw ConfigError("fit_exponential_decay: need at least 8 samples");
    for (const auto& [t, p] : survival) {
        if (!(p > 0.0) || p > 1.0 + 1e-12)
            throw ConfigError("fit_exponential_decay: P must lie in (0, 1]");
    }
    const auto skip = static_cast<std::size_t>(
        std::floor(skip_fraction * static_cast<double>(survival.size())));
    const std::size_t first = std::min(skip, survival.size() - 8);

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
    const auto m = static_cast<double>(survival.size() - first);
    for (std::size_t i = first; i < survival.size(); ++i) {
        const double t = survival[i].first;
        const double y = std::log(survival[i].second);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    const double denom = m * stt - st * st;
    if (!(std::abs(denom) > 0.0))
        throw ConfigError("fit_exponential_decay: degenerate time axis");
    const double slope = (m * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / m;

    double ss_res = 0.0;
    const double ybar = sy / m;
    double ss_tot = 0.0;
    for (std::size_t i = first; i < survival.size(); ++i) {
        const double t = survival[i].first;
        const double y = std::log(survival[i].second);
        const double r = y - (slope * t + intercept);
        ss_res += r * r;
        ss_tot += (y - ybar) * (y - ybar);
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.window = {survival[first].first, survival.back().first};
    fit.low_quality = fit.r_squared < 0.9;
    return fit;
}

} // namespace tunnelscope
