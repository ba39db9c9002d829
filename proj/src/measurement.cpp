#include "tunnelscope/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tunnelscope/analysis.hpp"
#include "tunnelscope/errors.hpp"
#include "tunnelscope/parallel.hpp"

namespace tunnelscope {

double MeasurementModel::pulse_duration() const {
    return std::visit([](const auto& m) { return m.pulse_duration; }, kind);
}

std::string outcome_label(const MeasurementEvent& ev) {
    switch (ev.outcome) {
        case OutcomeKind::Null: return "null";
        case OutcomeKind::Flash: return "flash";
        default: return std::to_string(ev.outcome_index);
    }
}

double EventLedger::total_atom_gain() const {
    double s = 0.0;
    for (const auto& ev : events) s += ev.delta_e_atom;
    return s;
}

std::vector<double> cover_centers(const Grid1D& grid, double pitch,
                                  double delta_l) {
    if (!(pitch > 0.0)) throw ConfigError("cover_centers: pitch must be > 0");
    const double lo = grid.x_min() - 8.0 * delta_l;
    const double hi = grid.x_max() + 8.0 * delta_l;
    std::vector<double> centers;
    for (double c = lo; c <= hi; c += pitch) centers.push_back(c);
    return centers;
}

KrausSet::KrausSet(GridPtr grid, double delta_l, std::vector<double> centers)
    : grid_(std::move(grid)), delta_l_(delta_l), centers_(std::move(centers)) {
    if (!(delta_l_ >= 2.0 * grid_->dx())) {
        std::ostringstream os;
        os << "kraus_set: delta_l = " << delta_l_
           << " is not resolvable on the grid (needs >= 2 dx = "
           << 2.0 * grid_->dx() << ")";
        throw ConfigError(os.str());
    }
    if (centers_.empty()) throw ConfigError("kraus_set: no centers");
    const std::size_t n = grid_->n();
    profiles_.assign(centers_.size() * n, 0.0);
    std::vector<double> coverage(n, 0.0);
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        double* row = &profiles_[j * n];
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (grid_->x(i) - centers_[j]) / (2.0 * delta_l_);
            row[i] = std::exp(-u * u);
            coverage[i] += row[i] * row[i];
        }
    }
    double cmin = coverage[0], cmax = coverage[0];
    for (double c : coverage) {
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    if (!(cmin > 0.0) || (cmax - cmin) / cmax > 1e-6) {
        std::ostringstream os;
        os << "kraus_set: center lattice leaves coverage gaps (relative ripple "
           << (cmax - cmin) / cmax << " > 1e-6); use pitch <= delta_l and span "
           << "the full grid";
        throw ConfigError(os.str());
    }
    // Normalization fix: divide pointwise so sum_j K_j^2(x) = 1 exactly.
    for (std::size_t i = 0; i < n; ++i) coverage[i] = 1.0 / std::sqrt(coverage[i]);
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        double* row = &profiles_[j * n];
        for (std::size_t i = 0; i < n; ++i) row[i] *= coverage[i];
    }
}

std::span<const double> KrausSet::profile(std::size_t j) const {
    return {&profiles_[j * grid_->n()], grid_->n()};
}

double KrausSet::completeness_residual() const {
    const std::size_t n = grid_->n();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < centers_.size(); ++j) {
            const double k = profiles_[j * n + i];
            s += k * k;
        }
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

std::vector<double> KrausSet::outcome_probabilities(const WaveFn& psi) const {
    if (!psi.grid->same_as(*grid_))
        throw ConfigError("kraus_set: state grid does not match");
    const std::size_t n = grid_->n();
    std::vector<double> density(n);
    double n2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        density[i] = std::norm(psi.amps[i]);
        n2 += density[i];
    }
    if (!(n2 > 0.0)) throw NumericsError("kraus_set: zero-norm state");
    std::vector<double> p(centers_.size(), 0.0);
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        const double* row = &profiles_[j * n];
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += row[i] * row[i] * density[i];
        p[j] = s / n2;
    }
    return p;
}

void KrausSet::apply(std::size_t j, WaveFn& psi) const {
    const std::size_t n = grid_->n();
    const double* row = &profiles_[j * n];
    for (std::size_t i = 0; i < n; ++i) psi.amps[i] *= row[i];
}

KrausSet kraus_set(GridPtr grid, double delta_l, std::vector<double> centers) {
    return KrausSet(std::move(grid), delta_l, std::move(centers));
}

KrausSet kraus_set(GridPtr grid, const BrightImaging& model) {
    const double pitch = model.pitch > 0.0 ? model.pitch : model.delta_l;
    auto centers = cover_centers(*grid, pitch, model.delta_l);
    return KrausSet(std::move(grid), model.delta_l, std::move(centers));
}

namespace {

// Scales psi so its norm^2 returns to `weight` (channels preserve the
// in-flight weight; branch probabilities are recorded conditionally).
void rescale_to_weight(WaveFn& psi, double weight, const char* who) {
    const double n2 = psi.norm_squared();
    if (!(n2 > 0.0)) throw NumericsError(std::string(who) + ": collapsed to zero norm");
    const double s = std::sqrt(weight / n2);
    for (auto& a : psi.amps) a *= s;
}

} // namespace

MeasurementEvent apply_bright(WaveFn& psi, std::span<const double> v,
                              const KrausSet& kraus, const BarrierRegion& region,
                              Rng& rng, const UnitSystem& units, double time) {
    const double weight = psi.norm_squared();
    const Observables before = observables(psi, v, units);
    const std::vector<double> p = kraus.outcome_probabilities(psi);

    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = p.size() - 1;
    for (std::size_t j = 0; j < p.size(); ++j) {
        acc += p[j];
        if (u < acc) {
            pick = j;
            break;
        }
    }
    // Degenerate zero-probability outcomes are never sampled: u < acc can
    // only trigger on a bin with p[j] > 0, and the tail fallback walks back
    // to the last nonzero bin.
    while (p[pick] <= 0.0 && pick > 0) --pick;

    kraus.apply(pick, psi);
    rescale_to_weight(psi, weight, "apply_bright");
    const Observables after = observables(psi, v, units);

    MeasurementEvent ev;
    ev.time = time;
    ev.kind = "bright";
    ev.outcome = OutcomeKind::Center;
    ev.outcome_index = static_cast<std::int64_t>(pick);
    ev.outcome_position = kraus.center(pick);
    ev.probability = p[pick];
    ev.delta_e_atom = after.total - before.total;
    ev.post_in_barrier =
        probability_in(psi, region.x_left, region.x_right) / weight;
    return ev;
}

std::pair<MeasurementEvent, WaveFn> apply_bright(const WaveFn& psi,
                                                 std::span<const double> v,
                                                 const BrightImaging& model,
                                                 const BarrierRegion& region,
                                                 Rng& rng, const UnitSystem& units) {
    KrausSet kraus = kraus_set(psi.grid, model);
    WaveFn out = psi;
    MeasurementEvent ev = apply_bright(out, v, kraus, region, rng, units);
    return {std::move(ev), std::move(out)};
}

namespace {

// Smooth mask rising from 0 outside the region to 1 inside; edge_width = 0
// degenerates to the sharp indicator.
std::vector<double> dark_mask(const Grid1D& grid, const DarkSpot& model) {
    std::vector<double> m(grid.n());
    if (model.edge_width > 0.0) {
        const double w = model.edge_width * std::sqrt(2.0);
        for (std::size_t i = 0; i < grid.n(); ++i) {
            const double x = grid.x(i);
            m[i] = 0.5 * (std::erf((x - model.region.x_left) / w) -
                          std::erf((x - model.region.x_right) / w));
        }
    } else {
        for (std::size_t i = 0; i < grid.n(); ++i) {
            const double x = grid.x(i);
            m[i] = (x >= model.region.x_left && x <= model.region.x_right) ? 1.0 : 0.0;
        }
    }
    return m;
}

MeasurementEvent finish_dark_event(WaveFn& psi, std::span<const double> v,
                                   const DarkSpot& model, const UnitSystem& units,
                                   double time, bool null_branch,
                                   double branch_probability,
                                   const Observables& before, double weight,
                                   const std::vector<double>& mask) {
    for (std::size_t i = 0; i < psi.amps.size(); ++i) {
        const double f = null_branch ? std::sqrt(mask[i])
                                     : std::sqrt(std::max(0.0, 1.0 - mask[i]));
        psi.amps[i] *= f;
    }
    rescale_to_weight(psi, weight, "apply_dark_spot");
    const Observables after = observables(psi, v, units);
    MeasurementEvent ev;
    ev.time = time;
    ev.kind = "dark";
    ev.outcome = null_branch ? OutcomeKind::Null : OutcomeKind::Flash;
    ev.probability = branch_probability;
    ev.delta_e_atom = after.total - before.total;
    ev.post_in_barrier =
        probability_in(psi, model.region.x_left, model.region.x_right) / weight;
    return ev;
}

} // namespace

std::pair<double, double> dark_spot_probabilities(const WaveFn& psi,
                                                  const DarkSpot& model) {
    const auto mask = dark_mask(*psi.grid, model);
    double in = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < psi.amps.size(); ++i) {
        const double d = std::norm(psi.amps[i]);
        in += mask[i] * d;
        n2 += d;
    }
    if (!(n2 > 0.0)) throw NumericsError("dark_spot: zero-norm state");
    const double p_null = in / n2;
    return {p_null, 1.0 - p_null};
}

MeasurementEvent apply_dark_spot(WaveFn& psi, std::span<const double> v,
                                 const DarkSpot& model, Rng& rng,
                                 const UnitSystem& units, double time) {
    const double weight = psi.norm_squared();
    const Observables before = observables(psi, v, units);
    const auto mask = dark_mask(*psi.grid, model);
    const auto [p_null, p_flash] = dark_spot_probabilities(psi, model);
    const bool null_branch = rng.uniform() < p_null;
    return finish_dark_event(psi, v, model, units, time, null_branch,
                             null_branch ? p_null : p_flash, before, weight, mask);
}

MeasurementEvent apply_dark_spot_null(WaveFn& psi, std::span<const double> v,
                                      const DarkSpot& model,
                                      const UnitSystem& units, double time) {
    const double weight = psi.norm_squared();
    const Observables before = observables(psi, v, units);
    const auto mask = dark_mask(*psi.grid, model);
    const auto [p_null, p_flash] = dark_spot_probabilities(psi, model);
    (void)p_flash;
    if (!(p_null > 0.0))
        throw NumericsError("apply_dark_spot_null: no amplitude in the region");
    return finish_dark_event(psi, v, model, units, time, true, p_null, before,
                             weight, mask);
}

TrajectoryRecord trajectory_run(const WaveFn& psi0, std::span<const double> v,
                                const BarrierRegion& region,
                                const MeasurementModel& model,
                                const std::vector<double>& schedule,
                                const PropagatorConfig& config,
                                std::uint64_t seed, std::uint64_t stream,
                                const UnitSystem& units) {
    Rng rng(seed, stream);
    TrajectoryRecord record;
    record.seed = seed;
    record.stream = stream;

    std::vector<double> times = schedule;
    const auto* continuous = std::get_if<ContinuousBright>(&model.kind);
    if (continuous) {
        times.clear();
        if (continuous->rate > 0.0) {
            const double horizon =
                static_cast<double>(config.max_steps) * config.dt;
            double t = 0.0;
            while (true) {
                t += -std::log(1.0 - rng.uniform()) / continuous->rate;
                if (t >= horizon) break;
                times.push_back(t);
            }
        }
    }

    std::optional<KrausSet> kraus;
    if (const auto* bright = std::get_if<BrightImaging>(&model.kind))
        kraus.emplace(kraus_set(psi0.grid, *bright));
    else if (continuous)
        kraus.emplace(kraus_set(
            psi0.grid, BrightImaging{continuous->delta_l,
                                     continuous->pulse_duration, 0.0}));

    RunHooks hooks;
    hooks.event_times = times;
    hooks.on_event = [&](double t, WaveFn& psi) {
        if (psi.norm_squared() < 1e-12) return;  // nothing left in flight
        if (kraus) {
            record.ledger.events.push_back(
                apply_bright(psi, v, *kraus, region, rng, units, t));
            if (continuous) record.ledger.events.back().kind = "continuous";
        } else {
            const auto& dark = std::get<DarkSpot>(model.kind);
            record.ledger.events.push_back(
                apply_dark_spot(psi, v, dark, rng, units, t));
        }
    };

    record.scattering = scattering_run(psi0, v, region, config, units, hooks);
    return record;
}

std::vector<double> traversal_schedule(const ScatteringRecord& baseline,
                                       std::size_t n_events) {
    if (n_events == 0) return {};
    double t1 = -1.0, t2 = -1.0;
    for (const auto& fs : baseline.history) {
        const double contact = fs.p_in + fs.p_right + fs.absorbed_right;
        if (contact >= 0.01) {
            if (t1 < 0.0) t1 = fs.t;
            t2 = fs.t;
        }
    }
    if (t1 < 0.0)
        throw NumericsError("traversal_schedule: the packet never reached the "
                            "barrier at the 1% level");
    if (!(t2 > t1)) t2 = baseline.elapsed;
    std::vector<double> times(n_events);
    for (std::size_t j = 0; j < n_events; ++j)
        times[j] = t1 + (t2 - t1) * static_cast<double>(j + 1) /
                            static_cast<double>(n_events + 1);
    return times;
}

EnsembleResult ensemble_transmission_raw(const WaveFn& psi0,
                                         std::span<const double> v,
                                         const BarrierRegion& region,
                                         const MeasurementModel& model,
                                         const std::vector<double>& schedule,
                                         std::size_t n_traj, std::uint64_t seed,
                                         const PropagatorConfig& config,
                                         const UnitSystem& units,
                                         std::size_t min_traj) {
    if (n_traj < min_traj) {
        std::ostringstream os;
        os << "ensemble_transmission: n_traj = " << n_traj << " must be >= "
           << min_traj;
        throw ConfigError(os.str());
    }
    EnsembleResult result;
    result.baseline = scattering_run(psi0, v, region, config, units);
    result.trajectories.resize(n_traj);
    parallel_for(n_traj, [&](std::size_t i) {
        result.trajectories[i] = trajectory_run(psi0, v, region, model, schedule,
                                                config, seed, i, units);
    });

    double sum = 0.0, sum2 = 0.0;
    for (const auto& rec : result.trajectories) {
        sum += rec.scattering.transmitted;
        sum2 += rec.scattering.transmitted * rec.scattering.transmitted;
    }
    const auto n = static_cast<double>(n_traj);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    const double stderr_mean = std::sqrt(var / n);

    EnsembleSummary& s = result.summary;
    s.n_traj = n_traj;
    s.t_measured = mean;
    s.t_stderr = stderr_mean;
    s.t_unitary = result.baseline.transmitted;
    s.enhancement = mean / s.t_unitary;
    s.ci_low = (mean - 1.96 * stderr_mean) / s.t_unitary;
    s.ci_high = (mean + 1.96 * stderr_mean) / s.t_unitary;
    return result;
}

EnsembleResult ensemble_transmission(const WaveFn& psi0, std::span<const double> v,
                                     const BarrierRegion& region,
                                     const MeasurementModel& model,
                                     const std::vector<double>& schedule,
                                     std::size_t n_traj, std::uint64_t seed,
                                     const PropagatorConfig& config,
                                     const UnitSystem& units) {
    return ensemble_transmission_raw(psi0, v, region, model, schedule, n_traj,
                                     seed, config, units, 100);
}

AuditReport bound_audit(const EventLedger& ledger, double v0, double e,
                        const MeasurementModel& model, const UnitSystem& units) {
    const double tau = model.pulse_duration();
    if (!(tau > 0.0))
        throw ConfigError("bound_audit: measurement model has no pulse_duration");
    (void)kappa(v0, e, units);  // validates the barrier parameters
    AuditReport report;
    report.budget = units.hbar / tau;
    report.n_events = ledger.events.size();
    double gain_in = 0.0;
    std::size_t over = 0;
    for (const auto& ev : ledger.events) {
        report.max_gain = std::max(report.max_gain, ev.delta_e_atom);
        if (ev.delta_e_atom > report.budget) ++over;
        if (ev.post_in_barrier >= 0.5) {
            ++report.n_in_barrier;
            gain_in += ev.delta_e_atom;
        }
    }
    if (report.n_events > 0)
        report.fraction_over_budget =
            static_cast<double>(over) / static_cast<double>(report.n_events);
    if (report.n_in_barrier > 0) {
        report.mean_gain_in_barrier =
            gain_in / static_cast<double>(report.n_in_barrier);
        report.c_ratio = report.mean_gain_in_barrier / report.budget;
    }
    return report;
}

FrequencyShift frequency_shift_estimate(double eta, double t,
                                        const UnitSystem& units) {
    if (!(eta > 0.0) || eta > 1.0)
        throw ConfigError("frequency_shift_estimate: eta must lie in (0, 1]");
    if (!(t > 0.0)) throw ConfigError("frequency_shift_estimate: t must be > 0");
    FrequencyShift f;
    f.per_photon_shift = eta / t;
    f.per_photon_energy = units.hbar * eta / t;
    f.photons_needed = 1.0 / eta;
    f.total_budget = units.hbar / t;
    return f;
}

} // namespace tunnelscope
