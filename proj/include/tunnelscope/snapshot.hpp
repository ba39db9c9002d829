#ifndef TUNNELSCOPE_SNAPSHOT_HPP
#define TUNNELSCOPE_SNAPSHOT_HPP

#include <cstdint>
#include <fstream>
#include <string>

namespace tunnelscope {

struct WaveFn;

// Binary snapshot stream for external plotting. Layout (little endian):
//   32-byte header: magic "TSCP" | version u32 | n u64 | dx f64 | reserved u64
//   frames: n * (re f64, im f64), appended per write_frame call.
class SnapshotWriter {
public:
    static constexpr std::uint32_t kVersion = 1;

    SnapshotWriter(const std::string& path, std::uint64_t n, double dx);
    void write_frame(const WaveFn& psi);
    std::size_t frames_written() const { return frames_; }

private:
    std::ofstream out_;
    std::uint64_t n_;
    std::size_t frames_ = 0;
};

} // namespace tunnelscope

#endif
