#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "uip/config.hpp"

namespace uip {

// CSV with `#` metadata lines, a header row and %.<precision>g numbers.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, int precision) : out_(out), precision_(precision) {}

  void meta(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  int precision_;
  bool row_started_ = false;
};

std::string format_number(double v, int precision);

struct CommandContext {
  std::ostream& csv;
  std::ostream& log;
  bool quiet = false;
};

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Each command writes its CSV to ctx.csv and returns an exit code.
int cmd_price(const ExperimentConfig& cfg, CommandContext& ctx);
int cmd_figure(const ExperimentConfig& cfg, CommandContext& ctx);
int cmd_hedge(const ExperimentConfig& cfg, CommandContext& ctx);
int cmd_converge(const ExperimentConfig& cfg, CommandContext& ctx);
int cmd_dual(const ExperimentConfig& cfg, CommandContext& ctx);
int cmd_check(const ExperimentConfig& cfg, CommandContext& ctx);

// The invariant suite behind cmd_check. Warnings go to `warnings`.
std::vector<CheckItem> run_invariant_suite(const ExperimentConfig& cfg, std::vector<std::string>& warnings);

// Dispatches by name and maps errors to exit codes: 1 for validation
// failures, 2 for OverflowGuard / NonFiniteResult.
int run_command(const std::string& name, const ExperimentConfig& cfg, CommandContext& ctx);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumeric = 2;

}  // namespace uip
