#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace phmp {

enum class Status { pass, fail, inconclusive };
const char* to_string(Status s);

struct Verdict {
  std::string name;
  Status status = Status::fail;
  nlohmann::json scale;   // N, epsilon, margins, ... ; never empty in a finished report
  nlohmann::json detail;  // certificates and measured values
};

inline Status status_of(bool pass, bool inconclusive = false) {
  return inconclusive ? Status::inconclusive : (pass ? Status::pass : Status::fail);
}

struct Report {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  std::map<std::string, double> timings;  // seconds, kept out of report.json

  void add(Verdict v) { verdicts.push_back(std::move(v)); }
  // 0 all pass, 2 any inconclusive, otherwise 1
  int exit_code() const;
  bool passed() const { return exit_code() == 0; }
};

// FNV-1a over the compact dump; key order is fixed by nlohmann's sorted objects
std::uint64_t config_hash(const nlohmann::json& config);
std::string hex64(std::uint64_t v);
std::string version();

// deterministic: no timings, no timestamps
nlohmann::json to_json(const Report& r);
nlohmann::json timings_json(const Report& r);

// writes report.json and timings.json into dir (created if missing)
void write_report(const Report& r, const std::string& dir);
void write_text(const std::string& path, const std::string& text);

}  // namespace phmp
