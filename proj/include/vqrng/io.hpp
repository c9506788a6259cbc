#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vqrng/bitstream.hpp"
#include "vqrng/digitizer.hpp"
#include "vqrng/entropy.hpp"
#include "vqrng/frames.hpp"
#include "vqrng/laser.hpp"
#include "vqrng/stat_suite.hpp"

namespace vqrng::io {

namespace fs = std::filesystem;

/// Packed bytes, LSB-first within each byte, plus a sidecar `<path>.json`
/// holding bit_count and the number of valid bits in the last byte.
void write_bits(const fs::path& path, const BitStream& bits);
/// Without a sidecar every bit of every byte is taken.
BitStream read_bits(const fs::path& path);

/// CSV `t_ns,px,py`.
void write_trace_csv(const fs::path& path, const PolarizedTrace& trace);

/// CSV `frame,ex,ey,latch,latch_sample`: the raw per-frame simulation output.
void write_energies_csv(const fs::path& path, const FrameSimulation& sim);
FrameSimulation read_energies_csv(const fs::path& path);

/// CSV `frame,ex,ey,sx,bit`.
void write_frames_csv(const fs::path& path, const std::vector<FrameRecord>& records);
std::vector<FrameRecord> read_frames_csv(const fs::path& path);

/// CSV `bin_left,bin_right,density`.
void write_histogram_csv(const fs::path& path, const Histogram& h);

void write_entropy_json(const fs::path& path, const EntropyReport& report);
EntropyReport read_entropy_json(const fs::path& path);

void write_suite_json(const fs::path& path, const nist::SuiteReport& report);
/// CSV `test,p_value,passed`; tests that could not run have an empty p_value.
void write_suite_csv(const fs::path& path, const std::vector<nist::TestOutcome>& rows);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& data);
std::string sha256_file(const fs::path& path);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace vqrng::io
