#ifndef CGL_IO_HPP
#define CGL_IO_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgl/diagnostics.hpp"
#include "cgl/ground_state.hpp"
#include "cgl/limits.hpp"
#include "cgl/spectral_grid.hpp"

namespace cgl {

inline constexpr const char* kDiagnosticsHeader =
    "t,mass,kinetic,potential,energy,hi_potential,lap,cross,grad_flow_sq,h2,h3";
inline constexpr const char* kSweepHeader = "theta,gap,sup_h1,sup_l2";
inline constexpr const char* kPairHeader = "t,h1,l2";
inline constexpr const char* kFitHeader = "mode,slope,constant,residual";
inline constexpr const char* kGroundStateHeader =
    "d,kinetic,potential,energy,quadrature_error";

/// 17 significant digits; parses back to the same double.
std::string format_double(double v);

void write_diagnostics_csv(std::span<const DiagnosticRecord> records, const std::string& path);
void write_diagnostics_csv(const Trajectory& traj, const std::string& path);
/// Throws IoError on a missing file, wrong header or malformed row.
std::vector<DiagnosticRecord> read_diagnostics_csv(const std::string& path);

void write_sweep_csv(const SweepResult& sweep, const std::string& path);
std::vector<SweepPoint> read_sweep_csv(const std::string& path);
void write_pair_csv(const PairResult& pair, const std::string& path);
void write_fit_csv(const SweepResult& sweep, const std::string& path);
void write_ground_state_csv(std::span<const GroundStateConstants> rows, const std::string& path);
std::string ground_state_csv(std::span<const GroundStateConstants> rows);

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 41;

struct SnapshotMeta {
  double theta = 0.0;
  double t = 0.0;
  int mu = 1;
  friend bool operator==(const SnapshotMeta&, const SnapshotMeta&) = default;
};

struct SnapshotFile {
  Field field;
  SnapshotMeta meta;
};

/// "CGLF", u32 version, u32 d, u32 n, f64 L, f64 theta, f64 t, i8 mu, then
/// n^d interleaved (re, im) f64 samples in row-major order; all little-endian.
void write_snapshot(const Field& field, const SnapshotMeta& meta, const std::string& path);
/// Throws IoError on bad magic, version mismatch or a truncated payload.
SnapshotFile read_snapshot(const std::string& path);

struct RunManifest {
  std::string command;
  /// format_config echo of the resolved configuration.
  std::string config;
  std::string version;
  int threads = 1;
  double wall_seconds = 0.0;
  /// Paths relative to the output directory.
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::string status;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

/// Writes `text` verbatim (binary mode, so LF stays LF).
void write_text_file(const std::string& path, const std::string& text);

/// Whole-file byte comparison.
bool files_identical(const std::string& a, const std::string& b);

}  // namespace cgl

#endif  // CGL_IO_HPP
