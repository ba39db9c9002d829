#ifndef TUNNELSCOPE_COOLING_HPP
#define TUNNELSCOPE_COOLING_HPP

#include <variant>
#include <vector>

#include "tunnelscope/potentials.hpp"
#include "tunnelscope/propagator.hpp"
#include "tunnelscope/rng.hpp"
#include "tunnelscope/units.hpp"
#include "tunnelscope/wavefunction.hpp"

namespace tunnelscope {

struct Particle {
    double x = 0.0;
    double v = 0.0;
};

// Point-particle model of the cloud; good enough for the expansion/kick
// protocol, which is classical apart from the uncertainty-limited floor.
struct ClassicalEnsemble {
    std::vector<Particle> particles;
    UnitSystem units;

    double temperature() const;       // m var(v) / kB
    double mean_x() const;
    double mean_v() const;
    double var_x() const;
    double var_v() const;
    double correlation_xv() const;    // Pearson correlation of (x, v)
};

ClassicalEnsemble gaussian_ensemble(std::size_t n, double sigma_x, double sigma_v,
                                    const UnitSystem& units, Rng& rng);

struct HarmonicKick {
    double omega = 0.0;
};
struct QuadrupoleKick {
    double gradient = 0.0;  // force magnitude, constant toward the center
};

struct KickSpec {
    std::variant<HarmonicKick, QuadrupoleKick> shape = HarmonicKick{};
    double duration = 0.0;  // tau_eff for an impulsive kick
    bool impulsive = true;
};

// Ballistic expansion x -> x + v t; builds the position-velocity correlation
// the kick removes.
ClassicalEnsemble free_expand(const ClassicalEnsemble& ens, double t);

struct KickResult {
    ClassicalEnsemble ensemble;
    double temperature_before = 0.0;
    double temperature_after = 0.0;
};

// Impulsive position-dependent kick. Harmonic: v -> v - omega^2 tau x.
// Quadrupole: v -> v - (g tau / m) sign(x).
KickResult delta_kick(const ClassicalEnsemble& ens, const KickSpec& kick);

// Impulse strength (omega^2 tau) minimizing the final velocity variance:
// the regression coefficient cov(x, v)/var(x). After ideal expansion from a
// point source this is exactly 1/t_free.
double optimal_kick_strength(const ClassicalEnsemble& ens);

// Quantum delta kick as a quadratic phase imprint
// exp(-i m omega^2 tau x^2 / (2 hbar)); position density is untouched.
// pre: kick.impulsive (finite-duration kicks go through the propagator).
WaveFn delta_kick_quantum(const WaveFn& psi, const KickSpec& kick,
                          const UnitSystem& units = UnitSystem::natural());

// Chirp rate of a freely expanded minimum-uncertainty packet (the matched
// impulse strength that restores a transform-limited state).
double matched_kick_strength(double sigma0, double t,
                             const UnitSystem& units = UnitSystem::natural());

struct SweepSegment {
    double duration = 0.0;
    double center = 0.0;
    double width = 0.0;   // barrier waist during this segment
    double height = 0.0;  // barrier peak height
};

struct SweepResult {
    double transferred = 0.0;      // probability right of the final barrier center
    double ground_fraction = 0.0;  // |<aux ground | psi>|^2
    double absorbed = 0.0;
    double remainder = 0.0;        // left behind in the source trap
    double aux_ground_energy = 0.0;
    WaveFn final_state;
};

// Drags a wide barrier through the trap in piecewise-static segments, then
// scores the probability carried into the pocket between the barrier and the
// trap wall against that pocket's ground state.
SweepResult velocity_select_sweep(const WaveFn& psi, const PotentialSpec& trap,
                                  const std::vector<SweepSegment>& sweep,
                                  const PropagatorConfig& config,
                                  const UnitSystem& units = UnitSystem::natural());

} // namespace tunnelscope

#endif
