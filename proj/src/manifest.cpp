#include "diachron/manifest.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <memory>

#include <openssl/evp.h>
#include <json.hpp>

#include "diachron/error.h"

namespace diachron {

namespace fs = std::filesystem;

namespace {

void digest_file(EVP_MD_CTX *ctx, const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  }
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string sha256_hex(const fs::path &path) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() != ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
      const auto rel = fs::relative(f, path).generic_string();
      EVP_DigestUpdate(ctx.get(), rel.data(), rel.size());
      digest_file(ctx.get(), f);
    }
  } else {
    digest_file(ctx.get(), path);
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

fs::path manifest_path_for(const fs::path &output) {
  if (fs::is_directory(output)) return output / "manifest.json";
  return fs::path(output.string() + ".manifest.json");
}

void write_manifest(const RunManifest &manifest, const fs::path &path) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  j["input_digests"] = manifest.input_digests;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["outputs"] = manifest.outputs;
  if (!manifest.metadata.empty()) j["metadata"] = manifest.metadata;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::map<std::string, std::string> read_key_value_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError(path.string(), line_no, "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw FormatError(path.string(), line_no, "empty key");
    values[key] = trim(t.substr(eq + 1));
  }
  return values;
}

}  // namespace diachron
