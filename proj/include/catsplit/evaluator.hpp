/*
 * Copyright (c) 2026 The catsplit Authors
 *
 * Licensed under the Apache License, Version 2.0;
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an 'AS IS' BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Generality / locality scoring of an edited head and report aggregation.
//
// generality = fraction of samples labeled with one of the split's
//              subcategories that the edited head classifies correctly, with
//              argmax over the full edited label space.
// locality   = (# correct by the edited head) / (# correct by the original head)
//              over samples labeled with a retained category (original label
//              space minus the split target). Values above 1 are possible.
//
// Reports carry every metric multiplied by 100.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catsplit/data.hpp"
#include "catsplit/document.hpp"
#include "catsplit/head.hpp"
#include "catsplit/taxonomy.hpp"

namespace catsplit {

struct GeneralityCount {
  std::size_t correct = 0;
  std::size_t total = 0;  // M
  double value() const noexcept;
};

struct LocalityCount {
  std::size_t edited_correct = 0;
  std::size_t original_correct = 0;
  std::size_t total = 0;  // N
  double value() const noexcept;
};

std::vector<std::string> predict_labels(const ClassifierHead& head, const Matrix& features);

// Throws "empty generality set" when no label belongs to the split.
GeneralityCount generality_from_predictions(std::span<const std::string> edited_predictions,
                                            std::span<const std::string> labels,
                                            const SplitSpec& split);
// Throws "locality undefined" when the original head gets nothing right.
LocalityCount locality_from_predictions(std::span<const std::string> original_predictions,
                                        std::span<const std::string> edited_predictions,
                                        std::span<const std::string> labels,
                                        std::span<const std::string> original_labels,
                                        std::string_view coarse_id);

GeneralityCount generality(const ClassifierHead& edited, const SplitSpec& split,
                           const FeatureDataset& eval);
LocalityCount locality(const ClassifierHead& original, const ClassifierHead& edited,
                       std::string_view coarse_id, const FeatureDataset& eval);

struct SplitMetrics {
  std::string split_id;
  std::string method;
  std::uint64_t seed = 0;
  double generality = 0.0;  // fractions, unscaled
  double locality = 0.0;
  std::size_t generality_samples = 0;  // M
  std::size_t locality_samples = 0;    // N
  std::vector<std::string> tags;

  double mean() const noexcept { return 0.5 * (generality + locality); }
};

SplitMetrics evaluate_split(const ClassifierHead& original, const EditedHead& edited,
                            const SplitSpec& split, const FeatureDataset& eval);

struct MetricTriple {
  double generality = 0.0;  // x100
  double locality = 0.0;
  double mean = 0.0;
};

struct ReportRow {
  std::string split_id;
  std::string method;
  std::uint64_t seed = 0;
  MetricTriple metrics;
  std::size_t generality_samples = 0;
  std::size_t locality_samples = 0;
};

struct TagGroup {
  std::string tag;
  std::size_t splits = 0;
  MetricTriple metrics;
};

struct EvalReport {
  std::vector<ReportRow> per_split;
  MetricTriple macro;
  std::vector<TagGroup> tag_groups;  // sorted by tag
};

// Unweighted mean over splits. Tags come from each SplitMetrics, or from the
// taxonomy entry of the split target when the metrics carry none.
EvalReport aggregate(std::span<const SplitMetrics> splits, const Taxonomy* taxonomy = nullptr);

Document report_document(const EvalReport& report);
void save_report(const EvalReport& report, const std::filesystem::path& path);
// "generality=46.30 locality=98.90 mean=72.60 splits=1"
std::string summary_line(const EvalReport& report);

}  // namespace catsplit
