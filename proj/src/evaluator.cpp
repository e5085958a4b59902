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

#include "catsplit/evaluator.hpp"

#include <cstdio>
#include <map>
#include <set>

#include "catsplit/error.hpp"

namespace catsplit {

namespace {

MetricTriple scaled(double generality, double locality) {
  return {100.0 * generality, 100.0 * locality, 100.0 * (0.5 * (generality + locality))};
}

}  // namespace

double GeneralityCount::value() const noexcept {
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double LocalityCount::value() const noexcept {
  return original_correct == 0
             ? 0.0
             : static_cast<double>(edited_correct) / static_cast<double>(original_correct);
}

std::vector<std::string> predict_labels(const ClassifierHead& head, const Matrix& features) {
  std::vector<std::string> out;
  out.reserve(features.rows());
  Vector logits(head.size());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    head.logits(features.row(i), logits);
    out.push_back(head.labels[argmax(logits)]);
  }
  return out;
}

GeneralityCount generality_from_predictions(std::span<const std::string> edited_predictions,
                                            std::span<const std::string> labels,
                                            const SplitSpec& split) {
  if (edited_predictions.size() != labels.size()) {
    throw ValidationError("generality: prediction and label counts differ");
  }
  std::set<std::string_view> targets;
  for (const auto& s : split.subcategories) targets.insert(s.id);
  GeneralityCount c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!targets.contains(labels[i])) continue;
    ++c.total;
    if (edited_predictions[i] == labels[i]) ++c.correct;
  }
  if (c.total == 0) {
    throw ValidationError("empty generality set: no samples of the subcategories of '" +
                          split.coarse_id + "'");
  }
  return c;
}

LocalityCount locality_from_predictions(std::span<const std::string> original_predictions,
                                        std::span<const std::string> edited_predictions,
                                        std::span<const std::string> labels,
                                        std::span<const std::string> original_labels,
                                        std::string_view coarse_id) {
  if (original_predictions.size() != labels.size() || edited_predictions.size() != labels.size()) {
    throw ValidationError("locality: prediction and label counts differ");
  }
  std::set<std::string_view> retained(original_labels.begin(), original_labels.end());
  retained.erase(coarse_id);
  LocalityCount c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!retained.contains(labels[i])) continue;
    ++c.total;
    if (original_predictions[i] == labels[i]) ++c.original_correct;
    if (edited_predictions[i] == labels[i]) ++c.edited_correct;
  }
  if (c.original_correct == 0) {
    throw ValidationError("locality undefined: the original head classifies no retained sample "
                          "correctly");
  }
  return c;
}

GeneralityCount generality(const ClassifierHead& edited, const SplitSpec& split,
                           const FeatureDataset& eval) {
  eval.validate();
  return generality_from_predictions(predict_labels(edited, eval.features), eval.labels, split);
}

LocalityCount locality(const ClassifierHead& original, const ClassifierHead& edited,
                       std::string_view coarse_id, const FeatureDataset& eval) {
  eval.validate();
  return locality_from_predictions(predict_labels(original, eval.features),
                                   predict_labels(edited, eval.features), eval.labels,
                                   original.labels, coarse_id);
}

SplitMetrics evaluate_split(const ClassifierHead& original, const EditedHead& edited,
                            const SplitSpec& split, const FeatureDataset& eval) {
  const auto g = generality(edited.head, split, eval);
  const auto l = locality(original, edited.head, split.coarse_id, eval);
  SplitMetrics m;
  m.split_id = split.coarse_id;
  if (!edited.provenance.empty()) {
    m.method = std::string(init_method_name(edited.provenance.front().second.method));
  }
  m.generality = g.value();
  m.locality = l.value();
  m.generality_samples = g.total;
  m.locality_samples = l.total;
  return m;
}

EvalReport aggregate(std::span<const SplitMetrics> splits, const Taxonomy* taxonomy) {
  EvalReport report;
  if (splits.empty()) return report;
  double g_sum = 0.0;
  double l_sum = 0.0;
  struct Acc {
    std::size_t n = 0;
    double g = 0.0;
    double l = 0.0;
  };
  std::map<std::string, Acc> tags;
  for (const auto& s : splits) {
    report.per_split.push_back({s.split_id, s.method, s.seed, scaled(s.generality, s.locality),
                                s.generality_samples, s.locality_samples});
    g_sum += s.generality;
    l_sum += s.locality;
    auto split_tags = s.tags;
    if (split_tags.empty() && taxonomy) {
      if (const auto* c = taxonomy->find(s.split_id)) split_tags = c->tags;
    }
    for (const auto& t : split_tags) {
      auto& acc = tags[t];
      ++acc.n;
      acc.g += s.generality;
      acc.l += s.locality;
    }
  }
  const auto n = static_cast<double>(splits.size());
  report.macro = scaled(g_sum / n, l_sum / n);
  for (const auto& [tag, acc] : tags) {
    const auto k = static_cast<double>(acc.n);
    report.tag_groups.push_back({tag, acc.n, scaled(acc.g / k, acc.l / k)});
  }
  return report;
}

Document report_document(const EvalReport& report) {
  auto triple = [](Document& d, const MetricTriple& m) {
    d["generality"] = m.generality;
    d["locality"] = m.locality;
    d["mean"] = m.mean;
  };
  Document doc;
  doc["splits"] = Document::array();
  for (const auto& r : report.per_split) {
    Document item;
    item["split"] = r.split_id;
    item["method"] = r.method;
    item["seed"] = r.seed;
    triple(item, r.metrics);
    item["M"] = r.generality_samples;
    item["N"] = r.locality_samples;
    doc["splits"].push_back(std::move(item));
  }
  Document macro;
  macro["splits"] = report.per_split.size();
  triple(macro, report.macro);
  doc["macro"] = std::move(macro);
  doc["tag_groups"] = Document::array();
  for (const auto& t : report.tag_groups) {
    Document item;
    item["tag"] = t.tag;
    item["splits"] = t.splits;
    triple(item, t.metrics);
    doc["tag_groups"].push_back(std::move(item));
  }
  return doc;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  write_document(report_document(report), path);
}

std::string summary_line(const EvalReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "generality=%.2f locality=%.2f mean=%.2f splits=%zu",
                report.macro.generality, report.macro.locality, report.macro.mean,
                report.per_split.size());
  return buf;
}

}  // namespace catsplit
