#ifndef TUNNELSCOPE_ANALYSIS_HPP
#define TUNNELSCOPE_ANALYSIS_HPP

#include <span>
#include <utility>
#include <vector>

#include "tunnelscope/grid.hpp"
#include "tunnelscope/potentials.hpp"
#include "tunnelscope/units.hpp"

namespace tunnelscope {

// Evanescent decay constant kappa = sqrt(2 m (v0 - e)) / hbar.
// pre: v0 > e >= 0 (otherwise nothing is tunneling).
double kappa(double v0, double e, const UnitSystem& units = UnitSystem::natural());

// The resolution / dwell-time / energy-uncertainty inequality chain for
// imaging an atom inside a barrier of height v0 at energy e with resolution
// delta_l. All members are exact numbers; the flags are order-of-magnitude
// conclusions, never hard failures.
struct BoundReport {
    double v0 = 0.0;
    double e = 0.0;
    double delta_l = 0.0;
    double kappa = 0.0;
    double decay_length = 0.0;            // 1/kappa
    double resolution_limit = 0.0;        // threshold: delta_l must beat 1/kappa
    double barrier_deficit = 0.0;         // v0 - e
    double energy_uncertainty_floor = 0.0;  // hbar^2 kappa^2 / 2m == barrier_deficit
    double momentum_uncertainty = 0.0;    // hbar / (2 delta_l)
    double dwell_time = 0.0;              // 2 m delta_l^2 / hbar
    double dwell_time_limit = 0.0;        // 2 m / (hbar kappa^2)
    double energy_floor = 0.0;            // hbar / dwell_time at this delta_l
    bool resolution_ok = false;           // delta_l < 1/kappa
    bool chain_holds = false;             // dwell_time < limit implies floor > deficit
};

BoundReport bound_chain(double v0, double e, double delta_l,
                        const UnitSystem& units = UnitSystem::natural());

// Plane-wave transmission through a rectangular barrier of height v0 and
// width d at energy e. Continuous across e = v0.
double rect_transmission_analytic(double e, double v0, double d,
                                  const UnitSystem& units = UnitSystem::natural());

// Quasi-bound decay rate of a well at energy e: attempt frequency
// omega_secular/2pi from the harmonic fit at the well minimum, times
// exp(-2 int kappa(x) dx) over the classically forbidden span on the side
// where the potential opens up again.
double wkb_decay_rate(std::span<const double> v, const Grid1D& grid, double e,
                      const BarrierRegion& trap_region,
                      const UnitSystem& units = UnitSystem::natural());

struct DecayFit {
    double rate = 0.0;       // fitted decay rate, > 0 for accepted fits
    double amplitude = 0.0;  // extrapolated P at t = 0 over the fit window
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    bool low_quality = false;  // r^2 < 0.9
};

// Least-squares fit of ln P against t over a window that skips the initial
// transient (the first `skip_fraction` of samples).
// pre: at least 8 samples, P in (0, 1].
DecayFit fit_exponential_decay(std::span<const std::pair<double, double>> survival,
                               double skip_fraction = 0.1);

} // namespace tunnelscope

#endif
