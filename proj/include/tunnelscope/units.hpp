#ifndef TUNNELSCOPE_UNITS_HPP
#define TUNNELSCOPE_UNITS_HPP

#include <string>

namespace tunnelscope {

// CODATA / SI constants used at the conversion boundary.
namespace si {
constexpr double hbar = 1.054571817e-34;     // J s
constexpr double kB = 1.380649e-23;          // J/K (exact)
constexpr double rb87_mass = 1.4432e-25;     // kg, standard atomic data
}

// Internal natural units: hbar = 1, and mass = 1 for the reference atom.
// SI values enter only through si_length / si_time at the config and
// report boundaries. si_time is derived, not free:
//     si_time = mass_SI * si_length^2 / hbar_SI
// which is exactly the condition that makes hbar = mass = 1 internally.
struct UnitSystem {
    double hbar = 1.0;       // action scale, fixed
    double mass = 1.0;       // atom mass in internal units
    double kB = 1.0;         // internal energy per Kelvin
    double si_length = 1.0;  // meters per internal length unit
    double si_time = 1.0;    // seconds per internal time unit
    std::string profile = "natural";

    // Pure internal units: hbar = m = kB = 1, temperatures are energies.
    static UnitSystem natural();

    // Atom of the given SI mass on a chosen length scale.
    static UnitSystem for_atom(double mass_si_kg, double si_length_m,
                               const std::string& name = "custom");

    // Rb-87 on a 1-micron length unit; time unit comes out ~1.37 ms.
    static UnitSystem rb87(double si_length_m = 1e-6);

    double energy_si() const { return si::hbar / si_time; }  // J per internal energy
    double temperature_to_energy(double kelvin) const { return kB * kelvin; }
    double length_to_si(double x) const { return x * si_length; }
    double time_to_si(double t) const { return t * si_time; }
    double energy_to_si(double e) const { return e * energy_si(); }
    double inverse_length_to_si(double k) const { return k / si_length; }
};

} // namespace tunnelscope

#endif
