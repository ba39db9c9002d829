#include "tunnelscope/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnelscope/errors.hpp"

namespace tunnelscope {

namespace {

void check_stability(double dt, std::span<const double> v, const Grid1D& grid,
                     const UnitSystem& units) {
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    const double kmax = grid.k_cutoff();
    const double tmax = units.hbar * kmax * kmax / (2.0 * units.mass);
    const double phase_v = dt * vmax / units.hbar;
    const double phase_t = dt * tmax;
    if (phase_v >= 0.5 || phase_t >= 0.5) {
        const double dt_ok = 0.45 / std::max(vmax / units.hbar, tmax);
        std::ostringstream os;
        os << "split_step: dt = " << dt << " violates the stability guard "
           << "(dt*max|V| = " << phase_v << ", dt*max(k^2/2m) = " << phase_t
           << "); use dt <= " << dt_ok;
        throw NumericsError(os.str());
    }
}

} // namespace

std::vector<double> make_absorber(const Grid1D& grid, double width,
                                  double strength) {
    if (width < 8.0 * grid.dx()) {
        std::ostringstream os;
        os << "make_absorber: width = " << width << " must be >= 8 dx = "
           << 8.0 * grid.dx();
        throw ConfigError(os.str());
    }
    if (width > 0.25 * (grid.x_max() - grid.x_min()))
        throw ConfigError("make_absorber: width exceeds a quarter of the grid");
    if (strength < 0.0) throw ConfigError("make_absorber: strength must be >= 0");
    std::vector<double> rate(grid.n(), 0.0);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double x = grid.x(i);
        const double d_left = x - grid.x_min();
        const double d_right = grid.x_max() - x;
        double u = 0.0;
        if (d_left < width)
            u = 1.0 - d_left / width;
        else if (d_right < width)
            u = 1.0 - d_right / width;
        if (u > 0.0) {
            const double s = std::sin(0.5 * std::numbers::pi * u);
            rate[i] = strength * s * s;
        }
    }
    return rate;
}

SplitOperator::SplitOperator(GridPtr grid, std::span<const double> v,
                             const PropagatorConfig& config,
                             const UnitSystem& units)
    : grid_(std::move(grid)), config_(config) {
    const std::size_t n = grid_->n();
    if (v.size() != n)
        throw ConfigError("split_step: potential array does not match grid");
    if (!(config.dt > 0.0)) throw ConfigError("split_step: dt must be > 0");
    check_stability(config.dt, v, *grid_, units);

    exp_v_half_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        exp_v_half_[i] = std::polar(1.0, -0.5 * v[i] * config.dt / units.hbar);

    exp_t_.resize(n);
    const auto& k = grid_->k_values();
    for (std::size_t j = 0; j < n; ++j) {
        const double w = units.hbar * k[j] * k[j] / (2.0 * units.mass);
        exp_t_[j] = std::polar(1.0, -w * config.dt);
    }

    if (config.absorber) {
        const auto rate = make_absorber(*grid_, config.absorber->width,
                                        config.absorber->strength);
        mask_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            mask_[i] = std::exp(-rate[i] * config.dt);
        ramp_points_ = static_cast<std::size_t>(
            std::ceil(config.absorber->width / grid_->dx())) + 1;
    }
}

void SplitOperator::step(WaveFn& psi) {
    if (psi.rep != Representation::Position)
        throw ConfigError("split_step: state must be in position representation");
    if (!psi.grid->same_as(*grid_))
        throw ConfigError("split_step: state grid does not match engine grid");
    const std::size_t n = grid_->n();
    auto* a = psi.amps.data();
    for (std::size_t i = 0; i < n; ++i) a[i] *= exp_v_half_[i];
    grid_->fft().forward(a);
    for (std::size_t j = 0; j < n; ++j) a[j] *= exp_t_[j];
    grid_->fft().inverse(a);
    for (std::size_t i = 0; i < n; ++i) a[i] *= exp_v_half_[i];
    if (!mask_.empty()) {
        const double dx = grid_->dx();
        double lost_l = 0.0, lost_r = 0.0;
        for (std::size_t i = 0; i < ramp_points_ && i < n; ++i) {
            const double f = mask_[i];
            lost_l += std::norm(a[i]) * (1.0 - f * f);
            a[i] *= f;
        }
        for (std::size_t i = n - std::min(ramp_points_, n); i < n; ++i) {
            const double f = mask_[i];
            lost_r += std::norm(a[i]) * (1.0 - f * f);
            a[i] *= f;
        }
        absorbed_left_ += lost_l * dx;
        absorbed_right_ += lost_r * dx;
    }
}

void SplitOperator::run(WaveFn& psi, std::size_t n_steps) {
    for (std::size_t s = 0; s < n_steps; ++s) step(psi);
}

WaveFn split_step(const WaveFn& psi, std::span<const double> v,
                  const PropagatorConfig& config, const UnitSystem& units,
                  double* absorbed_left, double* absorbed_right) {
    SplitOperator engine(psi.grid, v, config, units);
    WaveFn out = psi;
    engine.run(out, config.max_steps);
    if (absorbed_left) *absorbed_left = engine.absorbed_left();
    if (absorbed_right) *absorbed_right = engine.absorbed_right();
    return out;
}

std::vector<std::complex<double>> apply_hamiltonian(const WaveFn& psi,
                                                    std::span<const double> v,
                                                    const UnitSystem& units) {
    if (psi.rep != Representation::Position)
        throw ConfigError("apply_hamiltonian: state must be in position representation");
    const Grid1D& g = *psi.grid;
    if (v.size() != g.n())
        throw ConfigError("apply_hamiltonian: potential does not match grid");
    std::vector<std::complex<double>> kin = psi.amps;
    g.fft().forward(kin.data());
    const auto& k = g.k_values();
    for (std::size_t j = 0; j < g.n(); ++j)
        kin[j] *= units.hbar * units.hbar * k[j] * k[j] / (2.0 * units.mass);
    g.fft().inverse(kin.data());
    for (std::size_t i = 0; i < g.n(); ++i) kin[i] += v[i] * psi.amps[i];
    return kin;
}

namespace {

struct ImagTimeStepper {
    GridPtr grid;
    std::vector<double> exp_v;  // exp(-(V - vmin) dt); shift is harmless under
    std::vector<double> exp_t;  // per-step renormalization and avoids overflow
    double dt = 0.0;

    ImagTimeStepper(GridPtr g, std::span<const double> v, double vmin, double dt_,
                    const UnitSystem& units)
        : grid(std::move(g)), dt(dt_) {
        const std::size_t n = grid->n();
        exp_v.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            exp_v[i] = std::exp(-(v[i] - vmin) * dt / units.hbar);
        exp_t.resize(n);
        const auto& k = grid->k_values();
        for (std::size_t j = 0; j < n; ++j) {
            const double w = units.hbar * k[j] * k[j] / (2.0 * units.mass);
            exp_t[j] = std::exp(-w * dt);
        }
    }

    void step(WaveFn& psi) const {
        auto* a = psi.amps.data();
        const std::size_t n = grid->n();
        for (std::size_t i = 0; i < n; ++i) a[i] *= exp_v[i];
        grid->fft().forward(a);
        for (std::size_t j = 0; j < n; ++j) a[j] *= exp_t[j];
        grid->fft().inverse(a);
    }
};

double rayleigh_residual(const WaveFn& psi, std::span<const double> v,
                         const UnitSystem& units, double* energy_out) {
    const auto h_psi = apply_hamiltonian(psi, v, units);
    const double dx = psi.grid->dx();
    std::complex<double> e = 0.0;
    for (std::size_t i = 0; i < h_psi.size(); ++i)
        e += std::conj(psi.amps[i]) * h_psi[i];
    const double energy = e.real() * dx;  // psi is kept normalized
    double r2 = 0.0;
    for (std::size_t i = 0; i < h_psi.size(); ++i)
        r2 += std::norm(h_psi[i] - energy * psi.amps[i]);
    if (energy_out) *energy_out = energy;
    return std::sqrt(r2 * dx);
}

void orthogonalize(WaveFn& psi, const std::vector<GroundStateResult>& lower) {
    for (const auto& g : lower) {
        const std::complex<double> c = overlap(g.state, psi);
        for (std::size_t i = 0; i < psi.amps.size(); ++i)
            psi.amps[i] -= c * g.state.amps[i];
    }
}

// Smallest eigenpair of a small dense symmetric matrix by cyclic Jacobi
// rotations. Sizes here are <= 32, so robustness beats cleverness.
void jacobi_smallest(std::vector<double>& a, std::size_t m,
                     std::vector<double>& eigvec, double& eigval) {
    std::vector<double> q(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) q[i * m + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t r = p + 1; r < m; ++r) off += a[p * m + r] * a[p * m + r];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t r = p + 1; r < m; ++r) {
                const double apq = a[p * m + r];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[r * m + r] - a[p * m + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const double aip = a[i * m + p], air = a[i * m + r];
                    a[i * m + p] = c * aip - s * air;
                    a[i * m + r] = s * aip + c * air;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double api = a[p * m + i], ari = a[r * m + i];
                    a[p * m + i] = c * api - s * ari;
                    a[r * m + i] = s * api + c * ari;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double qip = q[i * m + p], qir = q[i * m + r];
                    q[i * m + p] = c * qip - s * qir;
                    q[i * m + r] = s * qip + c * qir;
                }
            }
        }
    }
    std::size_t imin = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (a[i * m + i] < a[imin * m + imin]) imin = i;
    eigval = a[imin * m + imin];
    eigvec.resize(m);
    for (std::size_t i = 0; i < m; ++i) eigvec[i] = q[i * m + imin];
}

// Restarted Lanczos refinement in the complement of `lower`. The split-step
// stage alone stalls once its O(dt) bias floor meets the shrinking dt, so
// deep residuals are finished here; a Krylov step only ever damps high
// components, which keeps hard-wall potentials stable.
double lanczos_refine(WaveFn& psi, std::span<const double> v,
                      const UnitSystem& units,
                      const std::vector<GroundStateResult>& lower, double tol,
                      std::size_t max_restarts, double* energy_out) {
    constexpr std::size_t kDim = 20;
    const double dx = psi.grid->dx();
    double energy = 0.0;
    double res = rayleigh_residual(psi, v, units, &energy);
    for (std::size_t restart = 0; restart < max_restarts && res > tol; ++restart) {
        std::vector<WaveFn> basis;
        basis.reserve(kDim);
        orthogonalize(psi, lower);
        psi.normalize();
        basis.push_back(psi);
        std::vector<double> alpha, beta;
        for (std::size_t j = 0; j < kDim; ++j) {
            WaveFn w = basis[j];
            w.amps = apply_hamiltonian(basis[j], v, units);
            std::complex<double> a = 0.0;
            for (std::size_t i = 0; i < w.amps.size(); ++i)
                a += std::conj(basis[j].amps[i]) * w.amps[i];
            alpha.push_back(a.real() * dx);
            // Full reorthogonalization against the basis and the deflated
            // lower states.
            orthogonalize(w, lower);
            for (const auto& b : basis) {
                const std::complex<double> c = overlap(b, w);
                for (std::size_t i = 0; i < w.amps.size(); ++i)
                    w.amps[i] -= c * b.amps[i];
            }
            const double b = w.norm();
            if (j + 1 == kDim || b < 1e-12) break;
            beta.push_back(b);
            for (auto& amp : w.amps) amp /= b;
            basis.push_back(std::move(w));
        }
        const std::size_t m = basis.size();
        std::vector<double> tmat(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) tmat[i * m + i] = alpha[i];
        for (std::size_t i = 0; i + 1 < m; ++i) {
            tmat[i * m + i + 1] = beta[i];
            tmat[(i + 1) * m + i] = beta[i];
        }
        std::vector<double> y;
        double theta = 0.0;
        jacobi_smallest(tmat, m, y, theta);
        WaveFn next = basis[0];
        for (auto& amp : next.amps) amp *= y[0];
        for (std::size_t j = 1; j < m; ++j)
            for (std::size_t i = 0; i < next.amps.size(); ++i)
                next.amps[i] += y[j] * basis[j].amps[i];
        orthogonalize(next, lower);
        next.normalize();
        psi = std::move(next);
        res = rayleigh_residual(psi, v, units, &energy);
    }
    if (energy_out) *energy_out = energy;
    return res;
}

GroundStateResult relax_state(std::span<const double> v, const GridPtr& grid,
                              double tol, const UnitSystem& units,
                              const ImagTimeOptions& opts,
                              const std::vector<GroundStateResult>& lower,
                              std::size_t excitation_hint) {
    if (tol < 1e-12)
        throw ConfigError("imaginary_time_ground: tol must be >= 1e-12");
    const std::size_t n = grid->n();
    if (v.size() != n)
        throw ConfigError("imaginary_time_ground: potential does not match grid");

    double vmin = v[0], vmax = v[0];
    std::size_t imin = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (v[i] < vmin) { vmin = v[i]; imin = i; }
        vmax = std::max(vmax, v[i]);
    }

    // Deterministic seed: a Gaussian at the potential minimum with a mild
    // spatial modulation so excited states have nonzero initial overlap.
    WaveFn psi;
    psi.grid = grid;
    psi.rep = Representation::Position;
    psi.amps.resize(n);
    const double x_c = grid->x(imin);
    const double sigma = std::max(5.0 * grid->dx(),
                                  (grid->x_max() - grid->x_min()) / 64.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (grid->x(i) - x_c) / (2.0 * sigma);
        double a = std::exp(-u * u);
        if (excitation_hint > 0) {
            const double phase = static_cast<double>(excitation_hint) *
                                 (grid->x(i) - x_c) / sigma;
            a *= std::cos(phase) + 0.3 * std::sin(phase);
        }
        psi.amps[i] = a;
    }
    orthogonalize(psi, lower);
    psi.normalize();

    double energy = 0.0;
    double best_residual = rayleigh_residual(psi, v, units, &energy);
    GroundStateResult best{energy, psi, best_residual, 0};

    // dt scaled to the seed's energy above the well bottom, which tracks the
    // level-spacing scale; vmax only guards against absurd inputs.
    (void)vmax;
    double dt = opts.dt0 > 0.0
                    ? opts.dt0
                    : std::min(10.0, 0.5 * units.hbar /
                                         std::max(1e-6, energy - vmin));
    ImagTimeStepper stepper(grid, v, vmin, dt, units);

    // Stage 1: imaginary-time blocks with dt halving once a block stops
    // improving. This projects out everything far from the ground state
    // cheaply, but its fixed point carries an O(dt) split bias, so it is
    // capped and the tight tolerance is finished by Krylov refinement.
    const std::size_t block = 64;
    const std::size_t warm_cap = std::min<std::size_t>(opts.max_steps, 4096);
    std::size_t steps = 0;
    double prev_residual = best_residual;
    while (steps < warm_cap) {
        for (std::size_t s = 0; s < block; ++s) {
            stepper.step(psi);
            orthogonalize(psi, lower);
            psi.normalize();
        }
        steps += block;
        const double res = rayleigh_residual(psi, v, units, &energy);
        if (res < best.residual) best = {energy, psi, res, steps};
        if (res <= tol) return best;
        if (res > 0.6 * prev_residual) {
            dt *= 0.5;
            stepper = ImagTimeStepper(grid, v, vmin, dt, units);
        }
        prev_residual = res;
    }

    // Stage 2: restarted Lanczos in the deflated subspace.
    psi = best.state;
    const std::size_t restarts = std::max<std::size_t>(
        8, (opts.max_steps - steps) / 128);
    const double res = lanczos_refine(psi, v, units, lower, tol, restarts, &energy);
    steps += restarts;  // bookkeeping only; Krylov work is per-restart
    if (res < best.residual) best = {energy, psi, res, steps};
    if (best.residual <= tol) return best;

    std::ostringstream os;
    os << "imaginary_time_ground: no convergence in the step budget; best "
       << "residual " << best.residual << " at energy " << best.energy
       << " (requested tol " << tol << ")";
    throw NumericsError(os.str());
}

} // namespace

GroundStateResult imaginary_time_ground(std::span<const double> v, GridPtr grid,
                                        double tol, const UnitSystem& units,
                                        const ImagTimeOptions& opts) {
    return relax_state(v, grid, tol, units, opts, {}, 0);
}

std::vector<GroundStateResult> imaginary_time_states(std::span<const double> v,
                                                     GridPtr grid,
                                                     std::size_t n_states,
                                                     double tol,
                                                     const UnitSystem& units,
                                                     const ImagTimeOptions& opts) {
    std::vector<GroundStateResult> states;
    states.reserve(n_states);
    for (std::size_t s = 0; s < n_states; ++s)
        states.push_back(relax_state(v, grid, tol, units, opts, states, s));
    return states;
}

ScatteringRecord scattering_run(const WaveFn& packet, std::span<const double> v,
                                const BarrierRegion& region,
                                const PropagatorConfig& config,
                                const UnitSystem& units, const RunHooks& hooks,
                                WaveFn* final_state) {
    if (!config.absorber)
        throw ConfigError("scattering_run: absorber must be enabled");
    if (!(region.x_left < region.x_right))
        throw ConfigError("scattering_run: empty barrier region");
    const Grid1D& g = *packet.grid;
    if (region.x_left < g.x_min() || region.x_right > g.x_max())
        throw ConfigError("scattering_run: region lies outside the grid");

    const Observables pre = observables(packet, v, units);
    if (!(pre.mean_p > 0.0) || pre.mean_x >= region.x_left)
        throw ConfigError(
            "scattering_run: packet must start left of the region with positive <p>");
    if (probability_in(packet, region.x_left, region.x_right) > 1e-6)
        throw ConfigError(
            "scattering_run: packet overlaps the barrier region (> 1e-6)");

    SplitOperator engine(packet.grid, v, config, units);
    WaveFn psi = packet;

    // Snap event times to step boundaries, keeping order.
    std::vector<std::pair<std::size_t, double>> events;
    events.reserve(hooks.event_times.size());
    for (double t : hooks.event_times) {
        const auto s = static_cast<std::size_t>(std::llround(t / config.dt));
        events.emplace_back(s, t);
    }
    std::sort(events.begin(), events.end());
    std::size_t next_event = 0;

    const double inner_left = g.x_min() + config.absorber->width;
    const double inner_right = g.x_max() - config.absorber->width;

    // Three-way split of |psi|^2: strictly left of the region, inside
    // [x_left, x_right], strictly right. Every grid point lands in exactly
    // one bucket, so the parts sum to norm^2 exactly.
    auto partition = [&](double& left, double& in, double& right) {
        left = in = right = 0.0;
        for (std::size_t i = 0; i < g.n(); ++i) {
            const double d = std::norm(psi.amps[i]);
            const double x = g.x(i);
            if (x < region.x_left)
                left += d;
            else if (x > region.x_right)
                right += d;
            else
                in += d;
        }
        left *= g.dx();
        in *= g.dx();
        right *= g.dx();
    };

    ScatteringRecord record;
    auto sample = [&](double t) {
        FluxSample fs;
        fs.t = t;
        partition(fs.p_left, fs.p_in, fs.p_right);
        fs.absorbed_left = engine.absorbed_left();
        fs.absorbed_right = engine.absorbed_right();
        record.history.push_back(fs);
    };

    if (hooks.snapshots) hooks.snapshots->write_frame(psi);
    sample(0.0);

    std::size_t steps = 0;
    bool resolved = false;
    while (steps < config.max_steps) {
        engine.step(psi);
        ++steps;
        const double t = static_cast<double>(steps) * config.dt;
        while (next_event < events.size() && events[next_event].first == steps) {
            if (hooks.on_event) hooks.on_event(t, psi);
            ++next_event;
        }
        if (hooks.snapshots && hooks.snapshot_every > 0 &&
            steps % hooks.snapshot_every == 0)
            hooks.snapshots->write_frame(psi);
        if (steps % config.sample_every == 0) {
            sample(t);
            const double inflight = probability_in(psi, inner_left, inner_right);
            if (inflight < config.inflight_threshold &&
                next_event >= events.size()) {
                resolved = true;
                break;
            }
        }
    }

    record.steps = steps;
    record.elapsed = static_cast<double>(steps) * config.dt;
    record.resolved = resolved;
    double left_now = 0.0, in_now = 0.0, right_now = 0.0;
    partition(left_now, in_now, right_now);
    record.remaining = in_now;
    record.transmitted = right_now + engine.absorbed_right();
    record.reflected = left_now + engine.absorbed_left();
    if (final_state) *final_state = std::move(psi);
    return record;
}

} // namespace tunnelscope
