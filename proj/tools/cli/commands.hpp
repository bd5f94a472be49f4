#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collrates/collusion.hpp"
#include "collrates/rates.hpp"
#include "collrates/worst.hpp"

namespace collrates::cli {

enum class Format { Csv, Tsv, Json };

Format parse_format(std::string_view name);

struct CRange {
  int lo = 2;
  int hi = 2;
};

// "4" or "3..9"
CRange parse_c_range(std::string_view text);

struct RunConfig {
  std::string command;
  Decoder decoder = Decoder::Joint;
  ClassTag class_tag = ClassTag::A;
  std::string pdf = "tardos";
  std::optional<CRange> c;
  std::optional<Format> format;
  std::string out;
  SolverConfig solver;
  // Points of the p grid for `curve` (and theta(p) samples of class-D reports).
  int grid = 501;
  std::int64_t samples = 1000000;
  bool plug_in = false;
  // `tables`: 0 for all three, otherwise 1, 2 or 3.
  int table = 0;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitCapability = 4;

// Runs one command, writing to `out` (or to cfg.out when set) and errors to
// `err`. Returns the process exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// argv front end.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// '#'-prefixed line listing every setting that influences the numbers.
std::string provenance_line(const RunConfig& cfg);

// Table bodies as emitted by `tables` (header line included, no provenance).
std::string table_joint(const SolverConfig& solver);
std::string table_simple(const SolverConfig& solver);
std::string table_eta();

}  // namespace collrates::cli
