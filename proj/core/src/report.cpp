#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "phmp/error.hpp"
#include "phmp/report.hpp"

#ifndef PHMP_VERSION
#define PHMP_VERSION "dev"
#endif

namespace phmp {

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

int Report::exit_code() const {
  bool failed = false;
  for (const auto& v : verdicts) {
    if (v.status == Status::inconclusive) return 2;
    failed = failed || v.status == Status::fail;
  }
  return failed ? 1 : 0;
}

std::uint64_t config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string version() { return PHMP_VERSION; }

nlohmann::json to_json(const Report& r) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    vs.push_back({{"name", v.name}, {"status", to_string(v.status)}, {"scale", v.scale}, {"detail", v.detail}});
  return {{"command", r.command},
          {"config", r.config},
          {"config_hash", hex64(config_hash(r.config))},
          {"verdicts", vs},
          {"exit_code", r.exit_code()},
          {"versions", {{"phmp", version()}, {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                                            NLOHMANN_JSON_VERSION_MINOR,
                                                                            NLOHMANN_JSON_VERSION_PATCH)}}}};
}

nlohmann::json timings_json(const Report& r) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : r.timings) j[k] = v;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

void write_report(const Report& r, const std::string& dir) {
  write_text((std::filesystem::path(dir) / "report.json").string(), to_json(r).dump(2) + "\n");
  write_text((std::filesystem::path(dir) / "timings.json").string(), timings_json(r).dump(2) + "\n");
}

}  // namespace phmp
