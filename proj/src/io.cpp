/*
 * Copyright (c) 2026, cmmrank authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cmm/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cmm {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoi(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot open " + path + " for writing");
  return f;
}

void write_config_comment(std::ofstream& f, const RunConfig& config) {
  f << "# config: " << config.dump() << "\n";
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

RankingDataset read_rankings(const std::string& path,
                             Orientation orientation) {
  std::ifstream f(path);
  if (!f) fail(errc::io_error, "cannot open " + path);
  std::string line;
  int lineno = 0;
  int n = -1;
  std::vector<std::string> names;
  std::vector<PartialRanking> rows;
  bool first_data_line = true;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::vector<std::string> fields = split(stripped, ',');
    for (auto& fld : fields) fld = trim(fld);

    if (first_data_line) {
      // a row with any non-integer token is a header of item names
      bool numeric = true;
      for (const auto& fld : fields) {
        int v;
        if (!fld.empty() && !parse_int(fld, v)) {
          numeric = false;
          break;
        }
      }
      if (!numeric) {
        names.assign(fields.begin(), fields.end());
        n = int(fields.size());
        first_data_line = false;
        continue;
      }
      first_data_line = false;
    }

    if (n < 0) n = int(fields.size());
    if (int(fields.size()) != n)
      fail(errc::inconsistent_width,
           "line " + std::to_string(lineno) + ": expected " +
               std::to_string(n) + " fields, got " +
               std::to_string(fields.size()));

    std::vector<int> values(std::size_t(n), kMissingSlot);
    for (int i = 0; i < n; ++i) {
      const std::string& fld = fields[std::size_t(i)];
      if (fld.empty()) continue;
      int v;
      if (!parse_int(fld, v))
        fail(errc::parse_error,
             "line " + std::to_string(lineno) + ": bad field '" + fld + "'");
      if (v == kMissingSlot) continue;
      if (v < 1 || v > n)
        fail(errc::invalid_label, "line " + std::to_string(lineno) +
                                      ": label " + std::to_string(v) +
                                      " outside 1.." + std::to_string(n));
      values[std::size_t(i)] = v;
    }

    std::vector<int> slots(std::size_t(n), kMissingSlot);
    if (orientation == Orientation::ordering) {
      slots = values;
    } else {
      // column i holds the rank of item i
      for (int item = 1; item <= n; ++item) {
        const int r = values[std::size_t(item - 1)];
        if (r == kMissingSlot) continue;
        if (slots[std::size_t(r - 1)] != kMissingSlot)
          fail(errc::duplicate_label, "line " + std::to_string(lineno) +
                                          ": rank " + std::to_string(r) +
                                          " assigned twice");
        slots[std::size_t(r - 1)] = item;
      }
    }

    try {
      rows.push_back(PartialRanking::from_slots(slots));
    } catch (const error& e) {
      fail(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (rows.empty()) fail(errc::empty_input, path + " holds no rankings");
  return RankingDataset::of(std::move(rows), std::move(names));
}

void write_rankings_csv(const std::string& path, const RankingDataset& data,
                        const RunConfig& config) {
  std::ofstream f = open_out(path);
  write_config_comment(f, config);
  if (!data.item_names.empty()) {
    for (int i = 0; i < data.n; ++i)
      f << (i ? "," : "") << data.item_names[std::size_t(i)];
    f << "\n";
  }
  for (const auto& row : data.rows) {
    for (int i = 0; i < data.n; ++i) {
      if (i) f << ",";
      if (row.slot(i) != kMissingSlot) f << row.slot(i);
    }
    f << "\n";
  }
}

void write_pref_matrix_csv(const std::string& path, const PreferenceMatrix& m,
                           const RankingDataset& data,
                           const RunConfig& config) {
  std::ofstream f = open_out(path);
  write_config_comment(f, config);
  f << "item_i,item_j,name_i,name_j,pbar,count\n";
  for (int i = 1; i <= m.n; ++i)
    for (int j = 1; j <= m.n; ++j) {
      if (i == j) continue;
      f << i << "," << j << "," << data.item_name(i) << ","
        << data.item_name(j) << "," << format_real(m.pbar(i, j)) << ","
        << m.count(i, j) << "\n";
    }
}

void write_rc_probs_csv(const std::string& path, const RcMatrix& rc,
                        const RunConfig& config) {
  std::ofstream f = open_out(path);
  write_config_comment(f, config);
  f << "rank";
  for (int l = 1; l <= rc.num_clusters; ++l) f << ",cluster" << l;
  f << "\n";
  for (int i = 0; i < rc.n; ++i) {
    f << (i + 1);
    for (int l = 0; l < rc.num_clusters; ++l)
      f << "," << format_real(rc.at(i, l));
    f << "\n";
  }
}

namespace {

std::string labels_field(const std::vector<label_t>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(int(labels[i]));
  }
  return out;
}

}  // namespace

void write_trace_csv(const std::string& path, const PosteriorTrace& trace,
                     const RunConfig& config) {
  std::ofstream f = open_out(path);
  write_config_comment(f, config);
  f << "# burn_in: " << trace.burn_in << "\n";
  f << "iteration,theta,z,log_target,distance_sum,z_accepted,theta_accepted,"
       "augment_accepts\n";
  for (int t = 0; t < trace.iterations(); ++t) {
    f << t << "," << format_real(trace.theta[std::size_t(t)]) << ","
      << labels_field(trace.z[std::size_t(t)]) << ","
      << format_real(trace.log_target[std::size_t(t)]) << ","
      << trace.distance_sum[std::size_t(t)] << ","
      << int(trace.z_accepted[std::size_t(t)]) << ","
      << int(trace.theta_accepted[std::size_t(t)]) << ","
      << trace.augment_accepts[std::size_t(t)] << "\n";
  }
}

PosteriorTrace read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(errc::io_error, "cannot open " + path);
  PosteriorTrace trace;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    if (stripped[0] == '#') {
      const std::string key = "# burn_in: ";
      if (stripped.rfind(key, 0) == 0)
        trace.burn_in = std::stoi(stripped.substr(key.size()));
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const std::vector<std::string> fields = split(stripped, ',');
    if (fields.size() != 8)
      fail(errc::parse_error, "trace row with wrong field count");
    trace.theta.push_back(std::stod(fields[1]));
    std::vector<label_t> labels;
    for (const auto& tok : split(fields[2], ';'))
      labels.push_back(label_t(std::stoi(tok)));
    trace.n = int(labels.size());
    trace.z.push_back(std::move(labels));
    trace.log_target.push_back(std::stod(fields[3]));
    trace.distance_sum.push_back(std::stoll(fields[4]));
    trace.z_accepted.push_back(std::uint8_t(std::stoi(fields[5])));
    trace.theta_accepted.push_back(std::uint8_t(std::stoi(fields[6])));
    trace.augment_accepts.push_back(std::stoi(fields[7]));
  }
  return trace;
}

std::string consensus_display(const std::vector<std::vector<int>>& clusters,
                              const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (c) out += " ≻ ";  // succession between clusters
    for (std::size_t k = 0; k < clusters[c].size(); ++k) {
      if (k) out += " ~ ";
      const int item = clusters[c][k];
      out += names.empty() ? "item" + std::to_string(item)
                           : names[std::size_t(item - 1)];
    }
  }
  return out;
}

std::string consensus_display(const std::vector<std::vector<int>>& clusters,
                              const RankingDataset& data) {
  return consensus_display(clusters, data.item_names);
}

void write_map_json(const std::string& path, const FitSummary& fit,
                    const RankingDataset& data, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["config"] = config;
  std::vector<int> z_labels;
  for (label_t l : fit.z.labels()) z_labels.push_back(int(l));
  j["z"] = z_labels;
  const auto clusters = ordered_clusters(fit.z);
  j["clusters"] = clusters;
  nlohmann::ordered_json named = nlohmann::ordered_json::array();
  for (const auto& cl : clusters) {
    nlohmann::ordered_json group = nlohmann::ordered_json::array();
    for (int item : cl) group.push_back(data.item_name(item));
    named.push_back(group);
  }
  j["clusters_named"] = named;
  j["display"] = consensus_display(clusters, data);
  j["ct"] = clustering_table(fit.z).sizes();
  j["theta"] = format_real(fit.theta);
  if (fit.bayesian) {
    j["theta_mean"] = format_real(fit.theta_mean);
    j["theta_ci95"] = {format_real(fit.theta_lo), format_real(fit.theta_hi)};
  }
  j["distance_sum"] = fit.distance_sum;
  std::ofstream f = open_out(path);
  f << j.dump(2) << "\n";
}

void write_search_report_csv(const std::string& path,
                             const SearchResult& result,
                             const RunConfig& config) {
  std::ofstream f = open_out(path);
  write_config_comment(f, config);
  f << "# steps: " << result.steps
    << (result.ambiguous ? " (selection ambiguous at the reported errors)"
                         : "")
    << "\n";
  f << "ct,criterion,se,theta,step_found,is_best\n";
  for (const auto& cand : result.visited) {
    std::string ct;
    for (std::size_t i = 0; i < cand.ct.sizes().size(); ++i) {
      if (i) ct += ';';
      ct += std::to_string(cand.ct.sizes()[i]);
    }
    f << ct << "," << format_real(cand.value) << "," << format_real(cand.se)
      << "," << format_real(cand.theta) << "," << cand.step_found << ","
      << (cand.ct == result.best().ct ? 1 : 0) << "\n";
  }
}

void write_psi_json(const std::string& path, double log_psi, double se,
                    const std::string& method, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["method"] = method;
  j["log_psi"] = format_real(log_psi);
  j["se_log"] = format_real(se);
  std::ofstream f = open_out(path);
  f << j.dump(2) << "\n";
}

void write_eval_csv(const std::string& path,
                    const std::vector<std::pair<int, double>>& rows,
                    const std::string& value_name, const RunConfig& config) {
  std::ofstream f = open_out(path);
  write_config_comment(f, config);
  f << "row," << value_name << "\n";
  for (const auto& [idx, value] : rows)
    f << idx << "," << format_real(value) << "\n";
}

void write_init_ct_json(const std::string& path, const InitialStructure& init,
                        const RankingDataset& data, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["ct"] = init.ct.sizes();
  std::vector<int> labels;
  for (label_t l : init.z.labels()) labels.push_back(int(l));
  j["z"] = labels;
  j["display"] = consensus_display(ordered_clusters(init.z), data);
  std::ofstream f = open_out(path);
  f << j.dump(2) << "\n";
}

}  // namespace cmm
