#ifndef TUNNELSCOPE_WAVEFUNCTION_HPP
#define TUNNELSCOPE_WAVEFUNCTION_HPP

#include <complex>
#include <span>
#include <vector>

#include "tunnelscope/grid.hpp"
#include "tunnelscope/units.hpp"

namespace tunnelscope {

enum class Representation { Position, Momentum };

// Complex amplitudes on a grid. Position norm^2 = sum |psi|^2 dx,
// momentum norm^2 = sum |psi~|^2 dk; the Fourier pair is unitary between
// the two, psi~(k) = dx/sqrt(2 pi) sum_i psi(x_i) exp(-i k x_i).
struct WaveFn {
    GridPtr grid;
    std::vector<std::complex<double>> amps;
    Representation rep = Representation::Position;

    double norm_squared() const;
    double norm() const;
    void normalize();  // scales to norm 1; throws on zero state
};

struct Observables {
    double norm = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

// Minimum-uncertainty packet, |psi|^2 standard deviation sigma:
//   psi ~ exp(-(x-x0)^2/(4 sigma^2) + i p0 x / hbar)
// pre: sigma > 3 dx and [x0 - 5 sigma, x0 + 5 sigma] inside the grid.
WaveFn gaussian_packet(const GridPtr& grid, double x0, double p0, double sigma,
                       const UnitSystem& units = UnitSystem::natural());

// Unitary discrete Fourier pair; rejects a transform in the wrong direction.
WaveFn to_momentum(const WaveFn& psi);
WaveFn to_position(const WaveFn& psi);

// Expectation values (normalized by the state's own norm^2). Kinetic energy
// is spectral, hbar^2 k^2 / 2m; potential is sum V |psi|^2 dx.
Observables observables(const WaveFn& psi, std::span<const double> v,
                        const UnitSystem& units = UnitSystem::natural());

// <a|b> with the dx measure; both states in position representation.
std::complex<double> overlap(const WaveFn& a, const WaveFn& b);

// Probability currently in [x_left, x_right] (inclusive), over norm^2 = raw.
double probability_in(const WaveFn& psi, double x_left, double x_right);

} // namespace tunnelscope

#endif
