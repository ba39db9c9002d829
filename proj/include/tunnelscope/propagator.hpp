#ifndef TUNNELSCOPE_PROPAGATOR_HPP
#define TUNNELSCOPE_PROPAGATOR_HPP

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tunnelscope/potentials.hpp"
#include "tunnelscope/snapshot.hpp"
#include "tunnelscope/units.hpp"
#include "tunnelscope/wavefunction.hpp"

namespace tunnelscope {

struct AbsorberSpec {
    double width = 0.0;     // ramp length at each grid edge, >= 8 dx
    double strength = 1.0;  // peak damping rate at the grid edge
};

struct PropagatorConfig {
    double dt = 1e-3;
    std::size_t max_steps = 200000;
    std::optional<AbsorberSpec> absorber;
    // Residual in-flight probability between the absorbers below which a
    // scattering run is considered resolved.
    double inflight_threshold = 1e-4;
    std::size_t sample_every = 64;  // flux-history sampling interval, steps
};

// cos^2-shaped damping-rate ramp at both grid edges: zero in the interior,
// `strength` at the outermost points. The per-step amplitude mask is
// exp(-rate * dt).
std::vector<double> make_absorber(const Grid1D& grid, double width,
                                  double strength);

// One Strang step is exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2).
// Phase tables are precomputed once per (V, dt); the engine carries the
// absorbed-probability tallies for the left and right ramps.
class SplitOperator {
public:
    SplitOperator(GridPtr grid, std::span<const double> v,
                  const PropagatorConfig& config,
                  const UnitSystem& units = UnitSystem::natural());

    void step(WaveFn& psi);
    void run(WaveFn& psi, std::size_t n_steps);

    double absorbed_left() const { return absorbed_left_; }
    double absorbed_right() const { return absorbed_right_; }
    const PropagatorConfig& config() const { return config_; }

private:
    GridPtr grid_;
    PropagatorConfig config_;
    std::vector<std::complex<double>> exp_v_half_;
    std::vector<std::complex<double>> exp_t_;
    std::vector<double> mask_;  // per-step amplitude factor, empty if no absorber
    std::size_t ramp_points_ = 0;
    double absorbed_left_ = 0.0;
    double absorbed_right_ = 0.0;
};

// Convenience wrapper: evolve a copy of psi for config.max_steps steps.
// Absorbed probability, when an absorber is configured, is returned through
// the optional tallies.
WaveFn split_step(const WaveFn& psi, std::span<const double> v,
                  const PropagatorConfig& config,
                  const UnitSystem& units = UnitSystem::natural(),
                  double* absorbed_left = nullptr,
                  double* absorbed_right = nullptr);

struct GroundStateResult {
    double energy = 0.0;
    WaveFn state;
    double residual = 0.0;  // ||H psi - E psi|| / ||psi||
    std::size_t steps = 0;
};

struct ImagTimeOptions {
    double dt0 = 0.0;  // 0: pick from the potential range
    std::size_t max_steps = 400000;
};

// First-order imaginary-time split with per-step renormalization and dt
// halving once the residual stalls. Throws NumericsError (carrying the best
// residual) if the budget runs out before `tol` is met.
GroundStateResult imaginary_time_ground(std::span<const double> v, GridPtr grid,
                                        double tol,
                                        const UnitSystem& units = UnitSystem::natural(),
                                        const ImagTimeOptions& opts = {});

// Lowest n_states eigenpairs by deflated imaginary time (each state is kept
// orthogonal to the converged ones). states[0] matches imaginary_time_ground.
std::vector<GroundStateResult> imaginary_time_states(
    std::span<const double> v, GridPtr grid, std::size_t n_states, double tol,
    const UnitSystem& units = UnitSystem::natural(), const ImagTimeOptions& opts = {});

// H psi for residual checks and test oracles (kinetic part is spectral).
std::vector<std::complex<double>> apply_hamiltonian(
    const WaveFn& psi, std::span<const double> v,
    const UnitSystem& units = UnitSystem::natural());

struct FluxSample {
    double t = 0.0;
    double p_left = 0.0;   // probability strictly left of the region
    double p_in = 0.0;     // inside [x_left, x_right]
    double p_right = 0.0;  // strictly right
    double absorbed_left = 0.0;
    double absorbed_right = 0.0;
};

struct ScatteringRecord {
    double transmitted = 0.0;  // right of region plus right-absorbed
    double reflected = 0.0;    // left of region plus left-absorbed
    double remaining = 0.0;    // still inside the region
    std::vector<FluxSample> history;
    std::size_t steps = 0;
    double elapsed = 0.0;
    bool resolved = false;  // in-flight probability dipped below threshold
};

// Optional instrumentation for a scattering run. Event times are snapped to
// the nearest step boundary; on_event may modify the state (measurement
// channels hook in here).
struct RunHooks {
    std::vector<double> event_times;
    std::function<void(double, WaveFn&)> on_event;
    SnapshotWriter* snapshots = nullptr;
    std::size_t snapshot_every = 0;
};

// Evolves an incident packet against the potential until the in-flight
// probability between the absorbers falls below config.inflight_threshold or
// the step budget runs out. pre: packet left of region with positive <p>,
// overlap with the region <= 1e-6, absorber configured.
ScatteringRecord scattering_run(const WaveFn& packet, std::span<const double> v,
                                const BarrierRegion& region,
                                const PropagatorConfig& config,
                                const UnitSystem& units = UnitSystem::natural(),
                                const RunHooks& hooks = {},
                                WaveFn* final_state = nullptr);

} // namespace tunnelscope

#endif
