#pragma once

// Configuration files, run manifests, CSV emission and the command-line
// dispatcher behind the `nehari` tool.
//
// Config format: plain text, `key = value` lines grouped under [model],
// [optimizer] and [sweep]; `#` starts a comment; keys before the first section
// header belong to [model]. Inline overrides use `section.key=value`.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nehari/bifurcation.hpp"

namespace nehari {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kThreadsEnv = "NEHARI_THREADS";

struct RunConfig {
  ModelSpec model = KirchhoffModel{1.0, 3.0, Grid{1, 200, 1.0}};
  OptimizerOptions optimizer;
  SweepConfig sweep;

  /// Canonical `section.key=value` listing of every effective setting.
  std::string snapshot() const;
};

/// Documented defaults, one line per key (used by --help).
std::string config_reference();

/// Parses config text. Throws ParseError (with line number) on malformed lines,
/// ValidationError listing unknown keys or naming the violated hypothesis.
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});

/// Reads `path` (throws IoError naming the path), then parses.
RunConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides = {});

struct RunManifest {
  std::string command;
  std::string config_snapshot;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  /// Hash of (command, config snapshot, seed, version); timestamps excluded.
  std::string hash() const;
  std::string to_text() const;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& s);

/// 17 significant digits; empty string for nullopt.
std::string format_number(double v);

/// Minimal CSV writer: comment rows first, then a header row, then data rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& manifest_hash);
  void comment(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::string text_;
};

/// Nodal CSV: manifest comment, `dim,n,h` header row and values, then a `value` column.
std::string grid_function_csv(const GridFunction& u, const std::string& manifest_hash);
GridFunction read_grid_function_csv(const std::string& path, double length = 1.0);

std::string sweep_csv(const DiagramReport& rep, const SweepConfig& cfg, std::uint64_t seed,
                      const std::string& manifest_hash);

/// Exit codes: 0 ok, 1 I/O, 2 validation, 3 non-convergence, 4 hypothesis violation.
int exit_code_for(const Error& e);

/// Entry point of the `nehari` executable: fiber | extremal | solve | sweep | check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nehari
