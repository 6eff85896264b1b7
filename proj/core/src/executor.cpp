#include <cstdio>
#include <sys/wait.h>

#include "modmig/error.hpp"
#include "modmig/sanitizer.hpp"

namespace modmig {

CommandExecutor shell_executor() {
  return [](const CheckCommand &cmd) -> ExecResult {
    // subshell so the redirect covers compound commands too
    const std::string shell_cmd = "( " + cmd.command + " ) 2>&1";
    FILE *pipe = ::popen(shell_cmd.c_str(), "r");
    if (!pipe)
      throw Error("cannot spawn: " + cmd.command);
    ExecResult result;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0)
      result.output.append(buf, got);
    const int status = ::pclose(pipe);
    if (status == -1)
      throw Error("cannot reap: " + cmd.command);
    if (WIFEXITED(status))
      result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
      result.exit_code = 128 + WTERMSIG(status);
    else
      result.exit_code = -1;
    return result;
  };
}

} // namespace modmig
