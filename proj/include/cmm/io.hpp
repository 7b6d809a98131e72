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

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cmm/bayes.hpp"
#include "cmm/model.hpp"
#include "cmm/pseudo.hpp"
#include "cmm/selection.hpp"
#include "cmm/types.hpp"

namespace cmm {

// Run parameters as an ordered key/value object. Every output embeds it
// (a '# config: ...' comment for CSV, a "config" field for JSON) so any
// artifact can be reproduced from its own header.
using RunConfig = nlohmann::ordered_json;

enum class Orientation { ordering, ranks };

// Delimited text, one ranking per line. In `ordering` orientation a row
// lists item labels by rank position; in `ranks` orientation column i
// holds the rank of item i. Blank or 0 entries mark missing slots. An
// optional first row of non-numeric tokens names the items. Lines starting
// with '#' are ignored.
RankingDataset read_rankings(const std::string& path, Orientation orientation);

void write_rankings_csv(const std::string& path, const RankingDataset& data,
                        const RunConfig& config);

void write_pref_matrix_csv(const std::string& path, const PreferenceMatrix& m,
                           const RankingDataset& data,
                           const RunConfig& config);

void write_rc_probs_csv(const std::string& path, const RcMatrix& rc,
                        const RunConfig& config);

void write_trace_csv(const std::string& path, const PosteriorTrace& trace,
                     const RunConfig& config);
PosteriorTrace read_trace_csv(const std::string& path);

// "a ~ b > c" style consensus rendering: '~' joins tied items, the
// succession mark separates clusters.
std::string consensus_display(const std::vector<std::vector<int>>& clusters,
                              const RankingDataset& data);
std::string consensus_display(const std::vector<std::vector<int>>& clusters,
                              const std::vector<std::string>& names);

struct FitSummary {
  Allocation z;
  double theta = 0.0;
  double theta_lo = 0.0;   // 95% interval, posterior fits only
  double theta_hi = 0.0;
  double theta_mean = 0.0;
  bool bayesian = false;
  long long distance_sum = 0;
};

void write_map_json(const std::string& path, const FitSummary& fit,
                    const RankingDataset& data, const RunConfig& config);

void write_search_report_csv(const std::string& path,
                             const SearchResult& result,
                             const RunConfig& config);

void write_psi_json(const std::string& path, double log_psi, double se,
                    const std::string& method, const RunConfig& config);

void write_eval_csv(const std::string& path,
                    const std::vector<std::pair<int, double>>& rows,
                    const std::string& value_name, const RunConfig& config);

void write_init_ct_json(const std::string& path, const InitialStructure& init,
                        const RankingDataset& data, const RunConfig& config);

// 12 significant digits; the fixed width keeps reruns byte-identical.
std::string format_real(double x);

}  // namespace cmm
