#include "tunnelscope/units.hpp"

namespace tunnelscope {

UnitSystem UnitSystem::natural() {
    UnitSystem u;
    u.profile = "natural";
    return u;
}

UnitSystem UnitSystem::for_atom(double mass_si_kg, double si_length_m,
                                const std::string& name) {
    UnitSystem u;
    u.mass = 1.0;
    u.si_length = si_length_m;
    u.si_time = mass_si_kg * si_length_m * si_length_m / si::hbar;
    u.kB = si::kB * u.si_time / si::hbar;  // kB_SI / (J per internal energy)
    u.profile = name;
    return u;
}

UnitSystem UnitSystem::rb87(double si_length_m) {
    return for_atom(si::rb87_mass, si_length_m, "rb87");
}

} // namespace tunnelscope
