#ifndef TUNNELSCOPE_MEASUREMENT_HPP
#define TUNNELSCOPE_MEASUREMENT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tunnelscope/propagator.hpp"
#include "tunnelscope/rng.hpp"
#include "tunnelscope/units.hpp"
#include "tunnelscope/wavefunction.hpp"

namespace tunnelscope {

// Pixelated fluorescence imaging at resolution delta_l: one Gaussian Kraus
// window per camera pixel, jointly normalized to a complete POVM.
struct BrightImaging {
    double delta_l = 0.0;
    double pulse_duration = 0.0;
    double pitch = 0.0;  // center lattice pitch; 0 means delta_l
};

// Null detection: a beam block imaged onto the barrier region. No scattered
// photon ("null") collapses the atom into the dark region.
struct DarkSpot {
    BarrierRegion region;
    double pulse_duration = 0.0;
    double edge_width = 0.0;  // 0 = sharp projector, > 0 = smoothed mask
};

// Bright imaging applied at Poisson-distributed times with the given rate.
struct ContinuousBright {
    double delta_l = 0.0;
    double rate = 0.0;
    double pulse_duration = 0.0;
};

struct MeasurementModel {
    std::variant<BrightImaging, DarkSpot, ContinuousBright> kind;

    MeasurementModel() : kind(BrightImaging{}) {}
    template <typename T>
    MeasurementModel(T v) : kind(std::move(v)) {}

    double pulse_duration() const;
};

enum class OutcomeKind { Center, Null, Flash };

struct MeasurementEvent {
    double time = 0.0;
    std::string kind;             // "bright", "dark", "continuous"
    OutcomeKind outcome = OutcomeKind::Center;
    std::int64_t outcome_index = -1;  // Kraus center index for bright outcomes
    double outcome_position = 0.0;    // center position, for bright outcomes
    double probability = 0.0;         // of the sampled branch, conditional on in-flight
    double delta_e_atom = 0.0;        // E_after - E_before, barrier included in both
    double post_in_barrier = 0.0;     // post-state probability inside the region
};

std::string outcome_label(const MeasurementEvent& ev);

// Per-run record of measurement back-action. The probe side is not
// simulated; by conservation its energy change is booked as minus the
// atom's.
struct EventLedger {
    std::vector<MeasurementEvent> events;

    double total_atom_gain() const;
    double attributed_probe_loss() const { return -total_atom_gain(); }
};

// Gaussian Kraus family K_j(x) ~ exp(-(x - c_j)^2 / (4 delta_l^2)), scaled
// pointwise so sum_j K_j(x)^2 = 1 exactly. Rejects center lists whose raw
// coverage of the grid ripples or gaps by more than 1e-6.
class KrausSet {
public:
    KrausSet(GridPtr grid, double delta_l, std::vector<double> centers);

    std::size_t size() const { return centers_.size(); }
    double center(std::size_t j) const { return centers_[j]; }
    std::span<const double> profile(std::size_t j) const;
    double completeness_residual() const;  // max_x |sum_j K_j^2 - 1|

    // p_j = int K_j^2 |psi|^2 dx / ||psi||^2 (enumerated, sums to 1)
    std::vector<double> outcome_probabilities(const WaveFn& psi) const;
    void apply(std::size_t j, WaveFn& psi) const;  // psi -> K_j psi, no renorm

private:
    GridPtr grid_;
    double delta_l_;
    std::vector<double> centers_;
    std::vector<double> profiles_;  // size() x n, row-major
};

// Center lattice covering the grid (extended past the edges so the raw
// Gaussian coverage is flat over every grid point).
std::vector<double> cover_centers(const Grid1D& grid, double pitch,
                                  double delta_l);

KrausSet kraus_set(GridPtr grid, double delta_l, std::vector<double> centers);
KrausSet kraus_set(GridPtr grid, const BrightImaging& model);

// One bright-imaging event: samples a pixel outcome, collapses the state in
// place (keeping its in-flight weight), and records the energy bookkeeping
// against the potential v.
MeasurementEvent apply_bright(WaveFn& psi, std::span<const double> v,
                              const KrausSet& kraus,
                              const BarrierRegion& region, Rng& rng,
                              const UnitSystem& units = UnitSystem::natural(),
                              double time = 0.0);

// Convenience overload building the Kraus set on the fly.
std::pair<MeasurementEvent, WaveFn> apply_bright(const WaveFn& psi,
                                                 std::span<const double> v,
                                                 const BrightImaging& model,
                                                 const BarrierRegion& region,
                                                 Rng& rng,
                                                 const UnitSystem& units =
                                                     UnitSystem::natural());

// Dark-spot branch probabilities for a state: (p_null, p_flash).
std::pair<double, double> dark_spot_probabilities(const WaveFn& psi,
                                                  const DarkSpot& model);

MeasurementEvent apply_dark_spot(WaveFn& psi, std::span<const double> v,
                                 const DarkSpot& model, Rng& rng,
                                 const UnitSystem& units = UnitSystem::natural(),
                                 double time = 0.0);

// Forces the null branch (conditioning rather than sampling); used for
// conditional-energy statistics. Throws if the region holds no probability.
MeasurementEvent apply_dark_spot_null(WaveFn& psi, std::span<const double> v,
                                      const DarkSpot& model,
                                      const UnitSystem& units = UnitSystem::natural(),
                                      double time = 0.0);

struct TrajectoryRecord {
    EventLedger ledger;
    ScatteringRecord scattering;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Measurement times for the scheduled models. For ContinuousBright the
// schedule argument is ignored and event times are drawn as a Poisson
// process from the trajectory's own stream.
TrajectoryRecord trajectory_run(const WaveFn& psi0, std::span<const double> v,
                                const BarrierRegion& region,
                                const MeasurementModel& model,
                                const std::vector<double>& schedule,
                                const PropagatorConfig& config,
                                std::uint64_t seed, std::uint64_t stream = 0,
                                const UnitSystem& units = UnitSystem::natural());

// Evenly spaced interior times of the traversal window of a unitary
// baseline: from the first flux sample with P(x >= x_left) >= 1% to the last.
std::vector<double> traversal_schedule(const ScatteringRecord& baseline,
                                       std::size_t n_events);

struct EnsembleSummary {
    double t_measured = 0.0;  // mean transmitted probability over trajectories
    double t_stderr = 0.0;
    double t_unitary = 0.0;
    double enhancement = 0.0;  // t_measured / t_unitary
    double ci_low = 0.0;       // 95% interval on the enhancement
    double ci_high = 0.0;
    std::size_t n_traj = 0;
};

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<TrajectoryRecord> trajectories;
    ScatteringRecord baseline;
};

// Monte-Carlo transmission under repeated measurement versus the unitary
// baseline. Trajectories run in parallel with per-index rng streams; results
// are reduced in index order, so output is independent of thread count.
// pre: n_traj >= 100 for the summary statistics (keep_trajectories with
// smaller counts is allowed for smoke tests via ensemble_transmission_raw).
EnsembleResult ensemble_transmission(const WaveFn& psi0, std::span<const double> v,
                                     const BarrierRegion& region,
                                     const MeasurementModel& model,
                                     const std::vector<double>& schedule,
                                     std::size_t n_traj, std::uint64_t seed,
                                     const PropagatorConfig& config,
                                     const UnitSystem& units = UnitSystem::natural());

EnsembleResult ensemble_transmission_raw(const WaveFn& psi0,
                                         std::span<const double> v,
                                         const BarrierRegion& region,
                                         const MeasurementModel& model,
                                         const std::vector<double>& schedule,
                                         std::size_t n_traj, std::uint64_t seed,
                                         const PropagatorConfig& config,
                                         const UnitSystem& units,
                                         std::size_t min_traj);

struct AuditReport {
    double budget = 0.0;  // hbar / pulse_duration
    std::size_t n_events = 0;
    std::size_t n_in_barrier = 0;      // events with post_in_barrier >= 0.5
    double mean_gain_in_barrier = 0.0;
    double max_gain = 0.0;
    double fraction_over_budget = 0.0;  // events with delta_e_atom > budget
    double c_ratio = 0.0;               // mean in-barrier gain / budget
};

// Compares every event's atom-energy gain against the probe's uncertainty
// budget hbar/pulse_duration. Reported, never asserted.
AuditReport bound_audit(const EventLedger& ledger, double v0, double e,
                        const MeasurementModel& model,
                        const UnitSystem& units = UnitSystem::natural());

struct FrequencyShift {
    double per_photon_shift = 0.0;   // eta / t
    double per_photon_energy = 0.0;  // hbar eta / t
    double photons_needed = 0.0;     // 1 / eta
    double total_budget = 0.0;       // hbar / t
};

// Energy ledger of the null-detection scheme: a phase shift eta accrued in
// time t shifts each photon by hbar*eta/t, and 1/eta photons are needed, so
// the available exchange is hbar/t regardless of eta.
FrequencyShift frequency_shift_estimate(double eta, double t,
                                        const UnitSystem& units = UnitSystem::natural());

} // namespace tunnelscope

#endif
