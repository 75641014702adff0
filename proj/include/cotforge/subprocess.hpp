#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace cotforge {

struct ProcessResult {
  int exit_code = -1;       // valid when !signaled
  int signal = 0;           // terminating signal, if any
  bool timed_out = false;   // killed by us at the deadline
  bool spawn_failed = false;
  std::string out;
  std::string err;
  std::int64_t wall_ms = 0;
};

// Spawns argv[0] (PATH lookup) in its own process group with stdin from
// /dev/null, captures stdout/stderr (each truncated to `max_capture` bytes),
// and kills the whole group with SIGKILL once `timeout` elapses.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout,
                          std::size_t max_capture = 1 << 20);

}  // namespace cotforge
