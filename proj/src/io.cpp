#include "vqrng/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "vqrng/error.hpp"

namespace vqrng::io {

using nlohmann::ordered_json;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

fs::path sidecar(const fs::path& path) { return fs::path(path.string() + ".json"); }

ordered_json read_json(const fs::path& path) {
  try {
    return ordered_json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, path.string() + ": " + e.what());
  }
}

double parse_double(std::string_view field, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    fail(ErrorCode::parse, path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return v;
}

// Splits every data line of a CSV file after checking the header.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header, std::size_t columns) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header)
    fail(ErrorCode::parse, path.string() + ": expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != columns)
      fail(ErrorCode::parse, path.string() + ":" + std::to_string(number) + ": expected " + std::to_string(columns) +
                                 " fields");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

void write_bits(const fs::path& path, const BitStream& bits) {
  const auto bytes = bits.to_bytes();
  write_text(path, std::string(bytes.begin(), bytes.end()));
  ordered_json j = {{"format", "packed bytes, LSB-first within each byte"},
                    {"bit_count", bits.size()},
                    {"trailing_bits", bits.size() % 8}};
  write_text(sidecar(path), j.dump(2) + "\n");
}

BitStream read_bits(const fs::path& path) {
  const std::string data = read_text(path);
  std::size_t count = data.size() * 8;
  if (fs::exists(sidecar(path))) {
    const auto j = read_json(sidecar(path));
    if (!j.contains("bit_count") || !j["bit_count"].is_number_unsigned())
      fail(ErrorCode::parse, sidecar(path).string() + ": missing bit_count");
    count = j["bit_count"].get<std::size_t>();
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(data.data());
  return BitStream::from_bytes(std::span(p, data.size()), count);
}

void write_trace_csv(const fs::path& path, const PolarizedTrace& trace) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "t_ns,px,py\n";
  for (std::size_t k = 0; k < trace.size(); ++k)
    out << format_double(static_cast<double>(k) * trace.dt) << ',' << format_double(trace.px[k]) << ','
        << format_double(trace.py[k]) << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

void write_energies_csv(const fs::path& path, const FrameSimulation& sim) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "frame,ex,ey,latch,latch_sample\n";
  for (std::size_t f = 0; f < sim.energies.size(); ++f)
    out << f << ',' << format_double(sim.energies[f].ex) << ',' << format_double(sim.energies[f].ey) << ','
        << format_double(sim.latch[f]) << ',' << sim.latch_index[f] << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

FrameSimulation read_energies_csv(const fs::path& path) {
  FrameSimulation sim;
  std::size_t line = 1;
  for (const auto& row : read_csv(path, "frame,ex,ey,latch,latch_sample", 5)) {
    ++line;
    sim.energies.push_back({parse_double(row[1], path, line), parse_double(row[2], path, line)});
    sim.latch.push_back(parse_double(row[3], path, line));
    sim.latch_index.push_back(static_cast<std::int64_t>(parse_double(row[4], path, line)));
  }
  return sim;
}

void write_frames_csv(const fs::path& path, const std::vector<FrameRecord>& records) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "frame,ex,ey,sx,bit\n";
  for (const auto& r : records)
    out << r.frame << ',' << format_double(r.ex) << ',' << format_double(r.ey) << ',' << format_double(r.sx) << ','
        << (r.bit ? 1 : 0) << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

std::vector<FrameRecord> read_frames_csv(const fs::path& path) {
  std::vector<FrameRecord> records;
  std::size_t line = 1;
  for (const auto& row : read_csv(path, "frame,ex,ey,sx,bit", 5)) {
    ++line;
    FrameRecord r;
    r.frame = static_cast<std::uint64_t>(parse_double(row[0], path, line));
    r.ex = parse_double(row[1], path, line);
    r.ey = parse_double(row[2], path, line);
    r.sx = parse_double(row[3], path, line);
    if (row[4] != "0" && row[4] != "1") fail(ErrorCode::parse, path.string() + ":" + std::to_string(line) + ": bad bit");
    r.bit = row[4] == "1";
    records.push_back(r);
  }
  return records;
}

void write_histogram_csv(const fs::path& path, const Histogram& h) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "bin_left,bin_right,density\n";
  for (std::size_t i = 0; i < h.bins(); ++i)
    out << format_double(h.bin_edges[i]) << ',' << format_double(h.bin_edges[i + 1]) << ','
        << format_double(h.densities[i]) << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

void write_entropy_json(const fs::path& path, const EntropyReport& r) {
  ordered_json j = {{"h_min", r.h_min},
                    {"p_window", r.p_window},
                    {"gamma_tilde", r.gamma_tilde},
                    {"sigma", r.sigma},
                    {"window_c", r.window_c},
                    {"window_width", r.window_width},
                    {"n_bits", r.n_bits},
                    {"n_ones", r.n_ones}};
  write_text(path, j.dump(2) + "\n");
}

EntropyReport read_entropy_json(const fs::path& path) {
  const auto j = read_json(path);
  EntropyReport r;
  try {
    r.h_min = j.at("h_min").get<double>();
    r.p_window = j.at("p_window").get<double>();
    r.gamma_tilde = j.at("gamma_tilde").get<double>();
    r.sigma = j.at("sigma").get<double>();
    r.window_c = j.at("window_c").get<double>();
    r.window_width = j.at("window_width").get<double>();
    r.n_bits = j.at("n_bits").get<std::uint64_t>();
    r.n_ones = j.at("n_ones").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, path.string() + ": " + e.what());
  }
  return r;
}

void write_suite_json(const fs::path& path, const nist::SuiteReport& report) {
  ordered_json j;
  j["alpha"] = report.alpha;
  j["all_passed"] = report.all_passed();
  ordered_json summary = ordered_json::array();
  for (const auto& t : report.summary) {
    ordered_json s = {{"test", t.name},
                      {"sequences", t.sequences},
                      {"passes", t.passes},
                      {"errors", t.errors},
                      {"pass_proportion", t.pass_proportion},
                      {"proportion_threshold", t.proportion_threshold}};
    s["uniformity_p"] = t.uniformity_p ? ordered_json(*t.uniformity_p) : ordered_json(nullptr);
    summary.push_back(std::move(s));
  }
  j["summary"] = std::move(summary);
  ordered_json seqs = ordered_json::array();
  for (const auto& seq : report.sequences) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : seq) {
      if (row.result)
        rows.push_back({{"test", row.name},
                        {"statistic", row.result->statistic},
                        {"p_value", row.result->p_value},
                        {"passed", row.result->passed}});
      else
        rows.push_back({{"test", row.name}, {"error", row.error}});
    }
    seqs.push_back(std::move(rows));
  }
  j["sequences"] = std::move(seqs);
  write_text(path, j.dump(2) + "\n");
}

void write_suite_csv(const fs::path& path, const std::vector<nist::TestOutcome>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "test,p_value,passed\n";
  for (const auto& row : rows)
    out << row.name << ',' << (row.result ? format_double(row.result->p_value) : "") << ','
        << (row.result && row.result->passed ? 1 : 0) << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + path.string());
}

std::string sha256_hex(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
    fail(ErrorCode::io, "SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

}  // namespace vqrng::io
