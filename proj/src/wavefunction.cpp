#include "tunnelscope/wavefunction.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnelscope/errors.hpp"

namespace tunnelscope {

namespace {

double measure(const WaveFn& psi) {
    return psi.rep == Representation::Position ? psi.grid->dx() : psi.grid->dk();
}

void check_same_grid(const WaveFn& psi, std::size_t v_size, const char* who) {
    if (v_size != psi.grid->n()) {
        std::ostringstream os;
        os << who << ": potential array length " << v_size
           << " does not match grid n = " << psi.grid->n();
        throw ConfigError(os.str());
    }
}

} // namespace

double WaveFn::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s * measure(*this);
}

double WaveFn::norm() const { return std::sqrt(norm_squared()); }

void WaveFn::normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw NumericsError("normalize: zero-norm state");
    const double s = 1.0 / std::sqrt(n2);
    for (auto& a : amps) a *= s;
}

WaveFn gaussian_packet(const GridPtr& grid, double x0, double p0, double sigma,
                       const UnitSystem& units) {
    if (!(sigma > 3.0 * grid->dx())) {
        std::ostringstream os;
        os << "gaussian_packet: sigma = " << sigma << " must exceed 3 dx = "
           << 3.0 * grid->dx();
        throw ConfigError(os.str());
    }
    if (x0 - 5.0 * sigma < grid->x_min() || x0 + 5.0 * sigma > grid->x_max()) {
        std::ostringstream os;
        os << "gaussian_packet: support [x0 - 5 sigma, x0 + 5 sigma] = ["
           << x0 - 5.0 * sigma << ", " << x0 + 5.0 * sigma
           << "] clipped by grid [" << grid->x_min() << ", " << grid->x_max() << "]";
        throw ConfigError(os.str());
    }
    WaveFn psi;
    psi.grid = grid;
    psi.rep = Representation::Position;
    psi.amps.resize(grid->n());
    const double k0 = p0 / units.hbar;
    for (std::size_t i = 0; i < grid->n(); ++i) {
        const double x = grid->x(i);
        const double arg = (x - x0) / (2.0 * sigma);
        psi.amps[i] = std::polar(std::exp(-arg * arg), k0 * x);
    }
    psi.normalize();
    return psi;
}

WaveFn to_momentum(const WaveFn& psi) {
    if (psi.rep != Representation::Position)
        throw ConfigError("to_momentum: state is already in momentum representation");
    WaveFn out;
    out.grid = psi.grid;
    out.rep = Representation::Momentum;
    out.amps = psi.amps;
    psi.grid->fft().forward(out.amps.data());
    const double scale = psi.grid->dx() / std::sqrt(2.0 * std::numbers::pi);
    const auto& k = psi.grid->k_values();
    const double xm = psi.grid->x_min();
    for (std::size_t j = 0; j < out.amps.size(); ++j)
        out.amps[j] *= scale * std::polar(1.0, -k[j] * xm);
    return out;
}

WaveFn to_position(const WaveFn& psi) {
    if (psi.rep != Representation::Momentum)
        throw ConfigError("to_position: state is already in position representation");
    WaveFn out;
    out.grid = psi.grid;
    out.rep = Representation::Position;
    out.amps = psi.amps;
    const auto& k = psi.grid->k_values();
    const double xm = psi.grid->x_min();
    for (std::size_t j = 0; j < out.amps.size(); ++j)
        out.amps[j] *= std::polar(1.0, k[j] * xm);
    psi.grid->fft().inverse(out.amps.data());
    const double scale = std::sqrt(2.0 * std::numbers::pi) / psi.grid->dx();
    for (auto& a : out.amps) a *= scale;
    return out;
}

Observables observables(const WaveFn& psi, std::span<const double> v,
                        const UnitSystem& units) {
    check_same_grid(psi, v.size(), "observables");
    const WaveFn* pos = &psi;
    WaveFn pos_storage;
    if (psi.rep == Representation::Momentum) {
        pos_storage = to_position(psi);
        pos = &pos_storage;
    }
    const Grid1D& g = *pos->grid;

    Observables obs;
    double n2 = 0.0, mx = 0.0, pot = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double d = std::norm(pos->amps[i]);
        n2 += d;
        mx += d * g.x(i);
        pot += d * v[i];
    }
    n2 *= g.dx();
    mx *= g.dx();
    pot *= g.dx();
    if (!(n2 > 0.0)) throw NumericsError("observables: zero-norm state");

    WaveFn mom = to_momentum(*pos);
    const auto& k = g.k_values();
    double mp = 0.0, kin = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double d = std::norm(mom.amps[j]);
        mp += d * k[j];
        kin += d * k[j] * k[j];
    }
    mp *= g.dk() * units.hbar;
    kin *= g.dk() * units.hbar * units.hbar / (2.0 * units.mass);

    obs.norm = std::sqrt(n2);
    obs.mean_x = mx / n2;
    obs.mean_p = mp / n2;
    obs.kinetic = kin / n2;
    obs.potential = pot / n2;
    obs.total = obs.kinetic + obs.potential;
    return obs;
}

std::complex<double> overlap(const WaveFn& a, const WaveFn& b) {
    if (!a.grid->same_as(*b.grid))
        throw ConfigError("overlap: states live on different grids");
    if (a.rep != b.rep)
        throw ConfigError("overlap: states are in different representations");
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        s += std::conj(a.amps[i]) * b.amps[i];
    return s * measure(a);
}

double probability_in(const WaveFn& psi, double x_left, double x_right) {
    if (psi.rep != Representation::Position)
        throw ConfigError("probability_in: state must be in position representation");
    const Grid1D& g = *psi.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double x = g.x(i);
        if (x >= x_left && x <= x_right) s += std::norm(psi.amps[i]);
    }
    return s * g.dx();
}

} // namespace tunnelscope
