#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace cotforge::cli {

int cmd_annotate(const RunConfig& cfg);
int cmd_exec(const RunConfig& cfg);
int cmd_select(const RunConfig& cfg);
int cmd_stats(const RunConfig& cfg);
int cmd_rm_labels(const RunConfig& cfg);

struct ReplOptions {
  std::optional<std::string> file;  // stdin when empty
  bool tokens = false;
  bool ast = false;
  std::int64_t timeout_ms = 10'000;
};
int cmd_repl(const ReplOptions& opts);

}  // namespace cotforge::cli
