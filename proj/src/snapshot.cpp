#include "tunnelscope/snapshot.hpp"

#include <cstring>

#include "tunnelscope/errors.hpp"
#include "tunnelscope/wavefunction.hpp"

namespace tunnelscope {

namespace {

template <typename T>
void put(std::ofstream& out, T value) {
    // Target platforms are little endian; the format is defined as such.
    out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

} // namespace

SnapshotWriter::SnapshotWriter(const std::string& path, std::uint64_t n, double dx)
    : out_(path, std::ios::binary), n_(n) {
    if (!out_) throw ConfigError("snapshot: cannot open " + path);
    const char magic[4] = {'T', 'S', 'C', 'P'};
    out_.write(magic, 4);
    put<std::uint32_t>(out_, kVersion);
    put<std::uint64_t>(out_, n);
    put<double>(out_, dx);
    put<std::uint64_t>(out_, 0);  // reserved
}

void SnapshotWriter::write_frame(const WaveFn& psi) {
    if (psi.amps.size() != n_)
        throw ConfigError("snapshot: frame size does not match header");
    for (const auto& a : psi.amps) {
        put<double>(out_, a.real());
        put<double>(out_, a.imag());
    }
    ++frames_;
}

} // namespace tunnelscope
