#include "tunnelscope/cooling.hpp"

#include <algorithm>
#include <cmath>

#include "tunnelscope/errors.hpp"

namespace tunnelscope {

namespace {

void require_nonempty(const ClassicalEnsemble& ens, const char* who) {
    if (ens.particles.empty())
        throw ConfigError(std::string(who) + ": empty ensemble");
}

} // namespace

double ClassicalEnsemble::mean_x() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.x;
    return s / static_cast<double>(particles.size());
}

double ClassicalEnsemble::mean_v() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.v;
    return s / static_cast<double>(particles.size());
}

double ClassicalEnsemble::var_x() const {
    const double m = mean_x();
    double s = 0.0;
    for (const auto& p : particles) s += (p.x - m) * (p.x - m);
    return s / static_cast<double>(particles.size());
}

double ClassicalEnsemble::var_v() const {
    const double m = mean_v();
    double s = 0.0;
    for (const auto& p : particles) s += (p.v - m) * (p.v - m);
    return s / static_cast<double>(particles.size());
}

double ClassicalEnsemble::temperature() const {
    return units.mass * var_v() / units.kB;
}

double ClassicalEnsemble::correlation_xv() const {
    const double mx = mean_x(), mv = mean_v();
    double sxx = 0.0, svv = 0.0, sxv = 0.0;
    for (const auto& p : particles) {
        sxx += (p.x - mx) * (p.x - mx);
        svv += (p.v - mv) * (p.v - mv);
        sxv += (p.x - mx) * (p.v - mv);
    }
    const double denom = std::sqrt(sxx * svv);
    return denom > 0.0 ? sxv / denom : 0.0;
}

ClassicalEnsemble gaussian_ensemble(std::size_t n, double sigma_x, double sigma_v,
                                    const UnitSystem& units, Rng& rng) {
    if (n == 0) throw ConfigError("gaussian_ensemble: n must be >= 1");
    ClassicalEnsemble ens;
    ens.units = units;
    ens.particles.resize(n);
    for (auto& p : ens.particles) {
        p.x = sigma_x * rng.normal();
        p.v = sigma_v * rng.normal();
    }
    return ens;
}

ClassicalEnsemble free_expand(const ClassicalEnsemble& ens, double t) {
    if (t < 0.0) throw ConfigError("free_expand: t must be >= 0");
    require_nonempty(ens, "free_expand");
    ClassicalEnsemble out = ens;
    for (auto& p : out.particles) p.x += p.v * t;
    return out;
}

KickResult delta_kick(const ClassicalEnsemble& ens, const KickSpec& kick) {
    require_nonempty(ens, "delta_kick");
    if (!kick.impulsive && !(kick.duration > 0.0))
        throw ConfigError("delta_kick: non-impulsive kick needs duration > 0");
    KickResult result;
    result.temperature_before = ens.temperature();
    result.ensemble = ens;
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, HarmonicKick>) {
                const double strength = shape.omega * shape.omega * kick.duration;
                for (auto& p : result.ensemble.particles) p.v -= strength * p.x;
            } else {
                const double dv = shape.gradient * kick.duration / ens.units.mass;
                for (auto& p : result.ensemble.particles)
                    p.v -= dv * (p.x > 0.0 ? 1.0 : (p.x < 0.0 ? -1.0 : 0.0));
            }
        },
        kick.shape);
    result.temperature_after = result.ensemble.temperature();
    return result;
}

double optimal_kick_strength(const ClassicalEnsemble& ens) {
    require_nonempty(ens, "optimal_kick_strength");
    const double mx = ens.mean_x(), mv = ens.mean_v();
    double sxx = 0.0, sxv = 0.0;
    for (const auto& p : ens.particles) {
        sxx += (p.x - mx) * (p.x - mx);
        sxv += (p.x - mx) * (p.v - mv);
    }
    if (!(sxx > 0.0))
        throw ConfigError("optimal_kick_strength: ensemble has no position spread");
    return sxv / sxx;
}

WaveFn delta_kick_quantum(const WaveFn& psi, const KickSpec& kick,
                          const UnitSystem& units) {
    if (!kick.impulsive)
        throw ConfigError("delta_kick_quantum: only impulsive kicks are supported; "
                          "propagate a time-dependent segment instead");
    const auto* harmonic = std::get_if<HarmonicKick>(&kick.shape);
    if (!harmonic)
        throw ConfigError("delta_kick_quantum: only the harmonic shape imprints a "
                          "quadratic phase");
    if (psi.rep != Representation::Position)
        throw ConfigError("delta_kick_quantum: state must be in position representation");
    const double strength = harmonic->omega * harmonic->omega * kick.duration;
    WaveFn out = psi;
    const double c = 0.5 * units.mass * strength / units.hbar;
    for (std::size_t i = 0; i < out.amps.size(); ++i) {
        const double x = psi.grid->x(i);
        out.amps[i] *= std::polar(1.0, -c * x * x);
    }
    return out;
}

double matched_kick_strength(double sigma0, double t, const UnitSystem& units) {
    if (!(sigma0 > 0.0) || t < 0.0)
        throw ConfigError("matched_kick_strength: need sigma0 > 0 and t >= 0");
    const double spread = units.hbar * t / (2.0 * units.mass * sigma0);
    const double sigma_t2 = sigma0 * sigma0 + spread * spread;
    return units.hbar * units.hbar * t /
           (4.0 * units.mass * units.mass * sigma0 * sigma0 * sigma_t2);
}

SweepResult velocity_select_sweep(const WaveFn& psi, const PotentialSpec& trap,
                                  const std::vector<SweepSegment>& sweep,
                                  const PropagatorConfig& config,
                                  const UnitSystem& units) {
    if (sweep.empty()) throw ConfigError("velocity_select_sweep: empty sweep");
    const GridPtr grid = psi.grid;
    const std::vector<double> v_trap = eval_potential(trap, *grid, units);

    SweepResult result;
    result.final_state = psi;
    double absorbed = 0.0;
    for (const auto& seg : sweep) {
        if (!(seg.duration >= 0.0))
            throw ConfigError("velocity_select_sweep: segment duration must be >= 0");
        std::vector<double> v = v_trap;
        const std::vector<double> vb = eval_potential(
            PotentialSpec{GaussianBeam{seg.height, seg.width, seg.center}}, *grid,
            units);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += vb[i];
        SplitOperator engine(grid, v, config, units);
        const auto steps =
            static_cast<std::size_t>(std::llround(seg.duration / config.dt));
        engine.run(result.final_state, steps);
        absorbed += engine.absorbed_left() + engine.absorbed_right();
    }

    const SweepSegment& last = sweep.back();
    result.absorbed = absorbed;
    // Strictly right of the final barrier center (the pocket side).
    result.transferred =
        probability_in(result.final_state, last.center, grid->x_max()) -
        probability_in(result.final_state, last.center, last.center);
    result.remainder = result.final_state.norm_squared() - result.transferred;

    // Pocket ground state: the potential with everything at or left of the
    // final barrier center walled off.
    std::vector<double> v_final = v_trap;
    const std::vector<double> vb = eval_potential(
        PotentialSpec{GaussianBeam{last.height, last.width, last.center}}, *grid,
        units);
    double vmax = 0.0;
    for (std::size_t i = 0; i < v_final.size(); ++i) {
        v_final[i] += vb[i];
        vmax = std::max(vmax, v_final[i]);
    }
    std::vector<double> v_aux = v_final;
    for (std::size_t i = 0; i < v_aux.size(); ++i)
        if (grid->x(i) <= last.center) v_aux[i] = std::max(v_aux[i], vmax);
    const GroundStateResult aux = imaginary_time_ground(v_aux, grid, 1e-7, units);
    result.aux_ground_energy = aux.energy;
    result.ground_fraction = std::norm(overlap(aux.state, result.final_state));
    return result;
}

} // namespace tunnelscope
