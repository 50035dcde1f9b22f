#include "cgl/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "cgl/error.hpp"

namespace cgl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<double> parse_row(const std::string& line, std::size_t columns,
                              const std::string& path, std::size_t row) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= line.size()) {
    const auto comma = std::min(line.find(',', start), line.size());
    double v = 0.0;
    const char* b = line.data() + start;
    const char* e = line.data() + comma;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e)
      throw IoError(path + ": malformed value on line " + std::to_string(row + 1));
    values.push_back(v);
    start = comma + 1;
  }
  if (values.size() != columns)
    throw IoError(path + ": expected " + std::to_string(columns) + " columns on line " +
                  std::to_string(row + 1));
  return values;
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out += static_cast<char>((bits >> (8 * i)) & 0xff);
}

std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

double get_f64(const std::string& in, std::size_t pos) {
  return std::bit_cast<double>(get_le(in, pos, 8));
}

}  // namespace

void write_diagnostics_csv(std::span<const DiagnosticRecord> records, const std::string& path) {
  std::string out = std::string(kDiagnosticsHeader) + "\n";
  for (const auto& r : records)
    append_row(out,
               {r.t, r.mass, r.kinetic, r.potential, r.energy, r.hi_potential, r.lap, r.cross,
                r.grad_flow_sq, r.h2, r.h3});
  write_text(path, out);
}

void write_diagnostics_csv(const Trajectory& traj, const std::string& path) {
  write_diagnostics_csv(traj.records, path);
}

std::vector<DiagnosticRecord> read_diagnostics_csv(const std::string& path) {
  const auto lines = lines_of(read_all(path));
  if (lines.empty() || lines[0] != kDiagnosticsHeader)
    throw IoError(path + ": missing diagnostics header");
  std::vector<DiagnosticRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto v = parse_row(lines[i], 11, path, i);
    records.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  return records;
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& p : sweep.points) append_row(out, {p.theta, p.gap, p.sup_h1, p.sup_l2});
  write_text(path, out);
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  const auto lines = lines_of(read_all(path));
  if (lines.empty() || lines[0] != kSweepHeader) throw IoError(path + ": missing sweep header");
  std::vector<SweepPoint> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto v = parse_row(lines[i], 4, path, i);
    points.push_back({v[0], v[1], v[2], v[3]});
  }
  return points;
}

void write_pair_csv(const PairResult& pair, const std::string& path) {
  std::string out = std::string(kPairHeader) + "\n";
  for (std::size_t i = 0; i < pair.times.size(); ++i)
    append_row(out, {pair.times[i], pair.h1[i], pair.l2[i]});
  write_text(path, out);
}

void write_fit_csv(const SweepResult& sweep, const std::string& path) {
  std::string out = std::string(kFitHeader) + "\n" + to_string(sweep.mode) + ",";
  out += format_double(sweep.fit.slope) + "," + format_double(sweep.fit.constant) + "," +
         format_double(sweep.fit.residual) + "\n";
  write_text(path, out);
}

std::string ground_state_csv(std::span<const GroundStateConstants> rows) {
  std::string out = std::string(kGroundStateHeader) + "\n";
  for (const auto& c : rows) {
    out += std::to_string(c.d);
    for (double v : {c.kinetic, c.potential, c.energy, c.quadrature_error})
      out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

void write_ground_state_csv(std::span<const GroundStateConstants> rows, const std::string& path) {
  write_text(path, ground_state_csv(rows));
}

void write_snapshot(const Field& field, const SnapshotMeta& meta, const std::string& path) {
  const auto& grid = field.grid();
  std::string out;
  out.reserve(kSnapshotHeaderBytes + 16 * field.size());
  out += "CGLF";
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(grid.d));
  put_u32(out, static_cast<std::uint32_t>(grid.n));
  put_f64(out, grid.L);
  put_f64(out, meta.theta);
  put_f64(out, meta.t);
  out += static_cast<char>(static_cast<std::int8_t>(meta.mu));
  for (std::size_t i = 0; i < field.size(); ++i) {
    put_f64(out, field[i].real());
    put_f64(out, field[i].imag());
  }
  write_text(path, out);
}

SnapshotFile read_snapshot(const std::string& path) {
  const std::string in = read_all(path);
  if (in.size() < 4 || in.compare(0, 4, "CGLF") != 0) throw IoError(path + ": bad magic");
  if (in.size() < kSnapshotHeaderBytes) throw IoError(path + ": truncated header");
  const auto version = static_cast<std::uint32_t>(get_le(in, 4, 4));
  if (version != kSnapshotVersion)
    throw IoError(path + ": unsupported snapshot version " + std::to_string(version));
  const auto d = static_cast<int>(get_le(in, 8, 4));
  const auto n = static_cast<int>(get_le(in, 12, 4));
  const double L = get_f64(in, 16);

  GridSpec grid;
  try {
    grid = make_grid(d, n, L);
  } catch (const InvalidArgument& e) {
    throw IoError(path + ": invalid grid in header (" + e.what() + ")");
  }
  SnapshotMeta meta;
  meta.theta = get_f64(in, 24);
  meta.t = get_f64(in, 32);
  meta.mu = static_cast<std::int8_t>(in[40]);

  const std::size_t count = grid.size();
  if (in.size() != kSnapshotHeaderBytes + 16 * count)
    throw IoError(path + ": truncated payload (" + std::to_string(in.size()) + " bytes, expected " +
                  std::to_string(kSnapshotHeaderBytes + 16 * count) + ")");
  std::vector<Complex> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t pos = kSnapshotHeaderBytes + 16 * i;
    values[i] = {get_f64(in, pos), get_f64(in, pos + 8)};
  }
  return {Field(grid, std::move(values)), meta};
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["version"] = m.version;
  j["threads"] = m.threads;
  j["wall_seconds"] = m.wall_seconds;
  j["outputs"] = m.outputs;
  j["warnings"] = m.warnings;
  j["status"] = m.status;
  write_text(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::string& path) {
  try {
    const auto j = nlohmann::json::parse(read_all(path));
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::string>();
    m.version = j.value("version", std::string());
    m.threads = j.value("threads", 1);
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.warnings = j.value("warnings", std::vector<std::string>{});
    m.status = j.value("status", std::string());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed manifest (" + e.what() + ")");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  write_text(path, text);
}

bool files_identical(const std::string& a, const std::string& b) {
  return read_all(a) == read_all(b);
}

}  // namespace cgl
