#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "altchain/sweep.hpp"
#include "altchain/version.hpp"

namespace altchain::io {

using nlohmann::json;

/// Reproduction metadata attached to every emitted table.
struct Metadata {
  int chi = 0;
  itebd::Schedule schedule;
  std::uint64_t seed = 0;
  std::string command;
  std::map<std::string, std::string> extra;

  json to_json() const {
    json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["chi"] = chi;
    j["seed"] = seed;
    j["schedule"] = {{"tau_initial", schedule.tau_initial},
                     {"tau_shrink", schedule.tau_shrink},
                     {"tau_floor", schedule.tau_floor},
                     {"sweeps_per_tau", schedule.sweeps_per_tau},
                     {"energy_tol", schedule.energy_tol}};
    for (const auto& [k, v] : extra) j[k] = v;
    return j;
  }

  void write_csv_header(std::ostream& os) const {
    os << "# version: " << kVersion << "\n# command: " << command << "\n# chi: " << chi
       << "\n# seed: " << seed << "\n# schedule: tau_initial=" << schedule.tau_initial
       << " tau_shrink=" << schedule.tau_shrink << " tau_floor=" << schedule.tau_floor
       << " sweeps_per_tau=" << schedule.sweeps_per_tau
       << " energy_tol=" << schedule.energy_tol << "\n";
    for (const auto& [k, v] : extra) os << "# " << k << ": " << v << "\n";
  }
};

namespace detail_io {

inline json record_to_json(const sweep::ScanRecord& r) {
  auto opt = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json j;
  j["lambda"] = r.params.lambda;
  j["delta"] = r.params.delta;
  j["B"] = r.params.b;
  if (!std::isnan(r.alpha)) j["alpha"] = r.alpha;
  j["energy"] = opt(r.energy);
  j["bond_entropy_odd"] = opt(r.bond_entropy_odd);
  j["bond_entropy_even"] = opt(r.bond_entropy_even);
  j["pair_entropy_odd"] = opt(r.pair_entropy_odd);
  j["pair_entropy_even"] = opt(r.pair_entropy_even);
  j["concurrence_odd"] = opt(r.concurrence_odd);
  j["concurrence_even"] = opt(r.concurrence_even);
  j["coherence_odd"] = opt(r.coherence_odd);
  j["coherence_even"] = opt(r.coherence_even);
  j["wysi_odd"] = opt(r.wysi_odd);
  j["wysi_even"] = opt(r.wysi_even);
  j["wysi_avg"] = opt(r.wysi_avg);
  if (!r.sop.empty()) {
    json s = json::object();
    for (const auto& [rr, v] : r.sop) s["r" + std::to_string(rr)] = v;
    j["sop"] = s;
  }
  j["fidelity_prev"] = opt(r.fidelity_prev);
  j["iterations"] = r.iterations;
  j["max_truncation_error"] = r.max_truncation_error;
  j["converged"] = r.converged;
  if (r.cold_checked) j["cold_energy_diff"] = opt(r.cold_energy_diff);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace detail_io

inline void write_records_csv(const std::string& path, const std::vector<sweep::ScanRecord>& recs,
                              const Metadata& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_records_csv: cannot open " + path);
  os.precision(15);
  meta.write_csv_header(os);
  os << "lambda,delta,B,alpha,energy,bond_entropy_odd,bond_entropy_even,pair_entropy_odd,"
        "pair_entropy_even,concurrence_odd,concurrence_even,coherence_odd,coherence_even,"
        "wysi_odd,wysi_even,wysi_avg";
  std::vector<int> sop_r;
  for (const auto& r : recs)
    for (const auto& [rr, v] : r.sop)
      if (std::find(sop_r.begin(), sop_r.end(), rr) == sop_r.end()) sop_r.push_back(rr);
  std::sort(sop_r.begin(), sop_r.end());
  for (int rr : sop_r) os << ",sop_r" << rr;
  os << ",fidelity_prev,iterations,max_truncation_error,converged,error\n";
  for (const auto& r : recs) {
    os << r.params.lambda << ',' << r.params.delta << ',' << r.params.b << ',' << r.alpha << ','
       << r.energy << ',' << r.bond_entropy_odd << ',' << r.bond_entropy_even << ','
       << r.pair_entropy_odd << ',' << r.pair_entropy_even << ',' << r.concurrence_odd << ','
       << r.concurrence_even << ',' << r.coherence_odd << ',' << r.coherence_even << ','
       << r.wysi_odd << ',' << r.wysi_even << ',' << r.wysi_avg;
    for (int rr : sop_r) {
      double v = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [r2, x] : r.sop)
        if (r2 == rr) v = x;
      os << ',' << v;
    }
    os << ',' << r.fidelity_prev << ',' << r.iterations << ',' << r.max_truncation_error << ','
       << (r.converged ? 1 : 0) << ',' << r.error << '\n';
  }
}

inline void write_records_json(const std::string& path, const std::vector<sweep::ScanRecord>& recs,
                               const Metadata& meta) {
  json j;
  j["metadata"] = meta.to_json();
  j["records"] = json::array();
  for (const auto& r : recs) j["records"].push_back(detail_io::record_to_json(r));
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_records_json: cannot open " + path);
  os << j.dump(2) << '\n';
}

/// Decide by extension: ".json" -> JSON, anything else -> CSV.
inline void write_records(const std::string& path, const std::vector<sweep::ScanRecord>& recs,
                          const Metadata& meta) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    write_records_json(path, recs, meta);
  else
    write_records_csv(path, recs, meta);
}

/// Key-value text config: one `key = value` per line, '#' comments.
inline std::map<std::string, std::string> parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("parse_config: cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parse_config: missing '=' on line " + std::to_string(lineno));
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace altchain::io
