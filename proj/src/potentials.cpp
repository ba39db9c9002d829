#include "tunnelscope/potentials.hpp"

#include <cmath>
#include <sstream>

#include "tunnelscope/errors.hpp"

namespace tunnelscope {

namespace {

void fail(const std::string& msg) { throw ConfigError(msg); }

void warn_if_clipped(double lo, double hi, const char* what, const Grid1D& grid,
                     std::vector<std::string>* warnings) {
    if (!warnings) return;
    if (lo < grid.x_min() || hi > grid.x_max()) {
        std::ostringstream os;
        os << what << " support [" << lo << ", " << hi << "] clipped by grid ["
           << grid.x_min() << ", " << grid.x_max() << "]";
        warnings->push_back(os.str());
    }
}

void validate_dwell(const std::vector<DwellPoint>& dwell) {
    if (dwell.empty()) fail("scanned beam: dwell list is empty");
    double sum = 0.0;
    for (const auto& d : dwell) {
        if (d.weight < 0.0) fail("scanned beam: negative dwell weight");
        sum += d.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "scanned beam: dwell weights sum to " << sum << ", expected 1";
        fail(os.str());
    }
}

void accumulate(const PotentialSpec& spec, const Grid1D& grid,
                const UnitSystem& units, std::vector<double>& v,
                std::vector<std::string>* warnings) {
    const std::size_t n = grid.n();
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rectangular>) {
                const double half = 0.5 * p.width;
                const double eps = 1e-9 * grid.dx();
                warn_if_clipped(p.center - half, p.center + half, "rectangular barrier",
                                grid, warnings);
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = std::abs(grid.x(i) - p.center);
                    if (d < half - eps)
                        v[i] += p.v0;
                    else if (d <= half + eps)
                        v[i] += 0.5 * p.v0;  // midpoint convention on the edge
                }
            } else if constexpr (std::is_same_v<T, GaussianBeam>) {
                warn_if_clipped(p.center - 2.0 * p.waist, p.center + 2.0 * p.waist,
                                "gaussian beam", grid, warnings);
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = (grid.x(i) - p.center) / p.waist;
                    v[i] += p.u0 * std::exp(-2.0 * u * u);
                }
            } else if constexpr (std::is_same_v<T, ScannedBeam>) {
                double lo = p.dwell.front().position, hi = lo;
                for (const auto& d : p.dwell) {
                    lo = std::min(lo, d.position);
                    hi = std::max(hi, d.position);
                }
                warn_if_clipped(lo - 2.0 * p.waist, hi + 2.0 * p.waist, "scanned beam",
                                grid, warnings);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = grid.x(i);
                    double s = 0.0;
                    for (const auto& d : p.dwell) {
                        const double u = (x - d.position) / p.waist;
                        s += d.weight * std::exp(-2.0 * u * u);
                    }
                    v[i] += p.u0 * s;
                }
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                const double c = 0.5 * units.mass * p.omega * p.omega;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = grid.x(i) - p.center;
                    v[i] += c * d * d;
                }
            } else if constexpr (std::is_same_v<T, Linear>) {
                for (std::size_t i = 0; i < n; ++i) v[i] += p.slope * grid.x(i);
            } else if constexpr (std::is_same_v<T, Composite>) {
                for (const auto& part : p.parts)
                    accumulate(part, grid, units, v, warnings);
            }
        },
        spec.value);
}

} // namespace

void validate_spec(const PotentialSpec& spec) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rectangular>) {
                if (p.v0 < 0.0) fail("rectangular barrier: v0 must be >= 0");
                if (!(p.width > 0.0)) fail("rectangular barrier: width must be > 0");
            } else if constexpr (std::is_same_v<T, GaussianBeam>) {
                if (p.u0 < 0.0) fail("gaussian beam: u0 must be >= 0");
                if (!(p.waist > 0.0)) fail("gaussian beam: waist must be > 0");
            } else if constexpr (std::is_same_v<T, ScannedBeam>) {
                if (p.u0 < 0.0) fail("scanned beam: u0 must be >= 0");
                if (!(p.waist > 0.0)) fail("scanned beam: waist must be > 0");
                validate_dwell(p.dwell);
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                if (p.omega < 0.0) fail("harmonic: omega must be >= 0");
            } else if constexpr (std::is_same_v<T, Composite>) {
                for (const auto& part : p.parts) validate_spec(part);
            }
        },
        spec.value);
}

std::vector<double> eval_potential(const PotentialSpec& spec, const Grid1D& grid,
                                   const UnitSystem& units,
                                   std::vector<std::string>* warnings) {
    validate_spec(spec);
    std::vector<double> v(grid.n(), 0.0);
    accumulate(spec, grid, units, v, warnings);
    return v;
}

std::vector<double> time_averaged_scan(double u0, double waist,
                                       const std::vector<DwellPoint>& dwell,
                                       const Grid1D& grid) {
    if (u0 < 0.0) fail("time_averaged_scan: u0 must be >= 0");
    if (!(waist > 0.0)) fail("time_averaged_scan: waist must be > 0");
    validate_dwell(dwell);
    return eval_potential(PotentialSpec{ScannedBeam{u0, waist, dwell}}, grid);
}

std::vector<DwellPoint> uniform_dwell(std::size_t count, double lo, double hi) {
    if (count == 0) fail("uniform_dwell: count must be >= 1");
    std::vector<DwellPoint> dwell(count);
    const double w = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.5
                                    : static_cast<double>(i) /
                                          static_cast<double>(count - 1);
        dwell[i] = {lo + t * (hi - lo), w};
    }
    return dwell;
}

double barrier_from_temperature(double kelvin, const UnitSystem& units) {
    if (kelvin < 0.0) fail("barrier_from_temperature: temperature must be >= 0");
    return units.temperature_to_energy(kelvin);
}

} // namespace tunnelscope
