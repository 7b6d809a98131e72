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

#include <stdexcept>
#include <string>

namespace cmm {

enum class errc {
  duplicate_label,
  out_of_range_label,
  empty_input,
  size_mismatch,
  dimension_mismatch,
  partial_data_not_allowed,
  too_large_for_enumeration,
  empty_stage,
  degenerate_weights,
  zero_mean_distance,
  non_convergence,
  single_cluster,
  parse_error,
  inconsistent_width,
  invalid_label,
  fully_missing_row,
  io_error,
  bad_config,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw error(code, what);
}

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::duplicate_label: return "DuplicateLabel";
    case errc::out_of_range_label: return "OutOfRangeLabel";
    case errc::empty_input: return "EmptyInput";
    case errc::size_mismatch: return "SizeMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::partial_data_not_allowed: return "PartialDataNotAllowed";
    case errc::too_large_for_enumeration: return "TooLargeForEnumeration";
    case errc::empty_stage: return "EmptyStage";
    case errc::degenerate_weights: return "DegenerateWeights";
    case errc::zero_mean_distance: return "ZeroMeanDistance";
    case errc::non_convergence: return "NonConvergence";
    case errc::single_cluster: return "SingleCluster";
    case errc::parse_error: return "ParseError";
    case errc::inconsistent_width: return "InconsistentWidth";
    case errc::invalid_label: return "InvalidLabel";
    case errc::fully_missing_row: return "FullyMissingRow";
    case errc::io_error: return "IoError";
    case errc::bad_config: return "BadConfig";
  }
  return "Error";
}

// Numeric/convergence failures map to CLI exit code 4, everything else to 3.
inline bool is_numeric_error(errc c) {
  switch (c) {
    case errc::too_large_for_enumeration:
    case errc::degenerate_weights:
    case errc::zero_mean_distance:
    case errc::non_convergence:
      return true;
    default:
      return false;
  }
}

}  // namespace cmm
