#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

struct CliResult {
  int code = -1;
  std::string output;
};

// Runs the CLI binary with `args` in `cwd`, capturing stdout and stderr.
inline CliResult run_cli(const std::filesystem::path &cwd, const std::string &args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" DIACHRON_BIN "' " + args + " 2>&1";
  CliResult r;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
