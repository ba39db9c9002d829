#ifndef TUNNELSCOPE_POTENTIALS_HPP
#define TUNNELSCOPE_POTENTIALS_HPP

#include <string>
#include <variant>
#include <vector>

#include "tunnelscope/grid.hpp"
#include "tunnelscope/units.hpp"

namespace tunnelscope {

// Spatial span used for transmission bookkeeping, dark-spot masks and
// survival tallies.
struct BarrierRegion {
    double x_left = 0.0;
    double x_right = 0.0;
};

struct Rectangular {
    double v0 = 0.0;      // height, >= 0
    double width = 0.0;   // full width
    double center = 0.0;
};

// Time-averaged intensity profile of a focused blue-detuned beam:
// u0 * exp(-2 (x - center)^2 / waist^2), waist = 1/e^2 intensity radius.
struct GaussianBeam {
    double u0 = 0.0;
    double waist = 0.0;
    double center = 0.0;
};

struct DwellPoint {
    double position = 0.0;
    double weight = 0.0;  // fraction of the scan period spent here
};

// Rapidly scanned beam; the atoms see the dwell-weighted average profile.
struct ScannedBeam {
    double u0 = 0.0;
    double waist = 0.0;
    std::vector<DwellPoint> dwell;
};

struct Harmonic {
    double omega = 0.0;
    double center = 0.0;
};

struct Linear {
    double slope = 0.0;  // dV/dx
};

struct PotentialSpec;

struct Composite {
    std::vector<PotentialSpec> parts;
};

struct PotentialSpec {
    std::variant<Rectangular, GaussianBeam, ScannedBeam, Harmonic, Linear,
                 Composite>
        value;

    PotentialSpec() : value(Rectangular{}) {}
    template <typename T>
    PotentialSpec(T v) : value(std::move(v)) {}
};

// Validates the spec (heights >= 0, waist > 0, dwell weights normalized to
// 1e-12, non-negative) and throws ConfigError on violation.
void validate_spec(const PotentialSpec& spec);

// Pointwise energy values on the grid; Composite sums parts. A barrier whose
// support is clipped by the grid appends a warning line when `warnings` is
// given. Rectangular edges use the midpoint convention: a grid point exactly
// on the edge takes v0/2.
std::vector<double> eval_potential(const PotentialSpec& spec, const Grid1D& grid,
                                   const UnitSystem& units = UnitSystem::natural(),
                                   std::vector<std::string>* warnings = nullptr);

// Resolved scan profile V(x) = u0 * sum_i w_i exp(-2 (x - c_i)^2 / waist^2).
// Equals a single GaussianBeam when the dwell list has one point.
std::vector<double> time_averaged_scan(double u0, double waist,
                                       const std::vector<DwellPoint>& dwell,
                                       const Grid1D& grid);

// Uniformly spaced dwell points with equal weights over [lo, hi].
std::vector<DwellPoint> uniform_dwell(std::size_t count, double lo, double hi);

// V0 = kB * T in internal energy units.
double barrier_from_temperature(double kelvin, const UnitSystem& units);

} // namespace tunnelscope

#endif
