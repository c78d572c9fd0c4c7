#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fssaudit/corpus.hpp"
#include "fssaudit/synthgen.hpp"

namespace fssaudit {

// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitData = 1, kExitNumerical = 2, kExitConfig = 3 };

struct RunConfig {
  std::filesystem::path input_dir;
  std::filesystem::path out_dir = ".";
  YearRange window_fss{2004, 2008};
  YearRange window_collab{2001, 2010};
  double threshold = 20.0;
  bool welch = false;
  bool one_sided = false;
  std::string clusters = "competition";
  bool positive_levels_p1_only = false;
  bool overlap_requires_sds = true;
  GenConfig gen;  // gen only

  // Throws ConfigError::InvalidConfig.
  void validate() const;
};

int cmd_gen(const RunConfig& cfg, std::ostream& out);
int cmd_score(const RunConfig& cfg, std::ostream& out);
int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_regress(const RunConfig& cfg, std::ostream& out);

// Parses argv and dispatches; errors are reported on `err` and mapped to
// ExitCode values.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fssaudit
