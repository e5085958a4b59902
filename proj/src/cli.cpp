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

#include "catsplit/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "catsplit/alignment.hpp"
#include "catsplit/data.hpp"
#include "catsplit/dictionary.hpp"
#include "catsplit/document.hpp"
#include "catsplit/error.hpp"
#include "catsplit/evaluator.hpp"
#include "catsplit/head.hpp"
#include "catsplit/head_editor.hpp"
#include "catsplit/lowshot.hpp"
#include "catsplit/synth.hpp"
#include "catsplit/taxonomy.hpp"

namespace catsplit::cli {

namespace fs = std::filesystem;

namespace {

void log(const std::string& message) { std::cerr << "catsplit: " << message << '\n'; }

// --head takes a head directory / head.json, or a bare weight tensor whose
// rows follow the taxonomy's row order.
ClassifierHead load_head_arg(const fs::path& path, const std::string& bias,
                             const Taxonomy& taxonomy) {
  if (path.extension() == ".cspl") {
    std::optional<Vector> b;
    if (!bias.empty()) b = load_tensor(bias).to_vector();
    return head_from_rows(taxonomy, load_tensor(path).to_matrix(), std::move(b));
  }
  if (!bias.empty()) throw ValidationError("--bias only applies to a .cspl weight tensor");
  auto head = load_head(path);
  for (const auto& label : head.labels) {
    if (!taxonomy.find(label)) {
      throw ValidationError("head label '" + label + "' is not in the taxonomy");
    }
  }
  return head;
}

const SplitSpec& choose_split(const Taxonomy& taxonomy, const std::string& coarse) {
  if (!coarse.empty()) return taxonomy.split_for(coarse);
  if (taxonomy.splits().size() != 1) {
    throw ValidationError("taxonomy declares " + std::to_string(taxonomy.splits().size()) +
                          " splits; choose one with --coarse");
  }
  return taxonomy.splits().front();
}

const Document& section(const Document& doc, const char* key) {
  return doc.contains(key) ? doc.at(key) : doc;
}

void apply_alignment_config(const Document& doc, AlignmentConfig& c) {
  c.hidden = doc.value("hidden", c.hidden);
  c.lr = doc.value("lr", c.lr);
  c.weight_decay = doc.value("weight_decay", c.weight_decay);
  c.batch = doc.value("batch", c.batch);
  c.max_epochs = doc.value("max_epochs", c.max_epochs);
  c.early_stopping = doc.value("early_stopping", c.early_stopping);
}

void apply_train_config(const Document& doc, SoftmaxTrainConfig& c) {
  c.lr = doc.value("lr", c.lr);
  c.weight_decay = doc.value("weight_decay", c.weight_decay);
  c.batch = doc.value("batch", c.batch);
  c.max_epochs = doc.value("max_epochs", c.max_epochs);
  c.early_stopping = doc.value("early_stopping", c.early_stopping);
}

template <typename T>
void override_with(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

struct Inputs {
  std::string taxonomy;
  std::string head;
  std::string bias;
  std::string dict;
  std::string emb;
  std::string align;
  std::string coarse;
};

void add_head_inputs(CLI::App* app, Inputs& in) {
  app->add_option("--taxonomy", in.taxonomy, "Taxonomy document")->required();
  app->add_option("--head", in.head, "Head directory, head.json, or weight tensor (.cspl)")
      ->required();
  app->add_option("--bias", in.bias, "Bias tensor for a .cspl head");
}

void add_split_deps(CLI::App* app, Inputs& in) {
  app->add_option("--dict", in.dict, "Modifier dictionary directory");
  app->add_option("--emb", in.emb, "Text embedding table document");
  app->add_option("--align", in.align, "Alignment model directory");
  app->add_option("--coarse", in.coarse, "Split target (needed when the taxonomy has several)");
}

struct LoadedDeps {
  ModifierDictionary dict;
  TextEmbeddingTable emb;
  AlignmentModel align;
  SplitDependencies deps;
};

void load_deps(const Inputs& in, LoadedDeps& out) {
  if (!in.dict.empty()) {
    out.dict = load_dictionary(in.dict);
    out.deps.dictionary = &out.dict;
  }
  if (!in.emb.empty()) {
    out.emb = load_embedding_table(in.emb);
    out.deps.embeddings = &out.emb;
  }
  if (!in.align.empty()) {
    out.align = load_alignment_model(in.align);
    out.deps.alignment = &out.align;
  }
}

std::string format(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Split a coarse category of a trained classifier head into subcategories", "catsplit"};
  app.require_subcommand(1);

  // taxonomy validate
  auto* tax_cmd = app.add_subcommand("taxonomy", "Taxonomy utilities");
  tax_cmd->require_subcommand(1);
  std::string tax_path;
  auto* tax_validate = tax_cmd->add_subcommand("validate", "Load and validate a taxonomy document");
  tax_validate->add_option("path", tax_path, "Taxonomy document")->required();

  // dict build
  auto* dict_cmd = app.add_subcommand("dict", "Modifier dictionary");
  dict_cmd->require_subcommand(1);
  Inputs dict_in;
  std::string dict_out;
  auto* dict_build = dict_cmd->add_subcommand("build", "Mine modifier vectors from a head");
  add_head_inputs(dict_build, dict_in);
  dict_build->add_option("-o,--output", dict_out, "Output directory")->required();

  // split
  Inputs split_in;
  std::string split_method;
  std::optional<std::uint64_t> split_seed;
  std::string split_out;
  auto* split_cmd = app.add_subcommand("split", "Zero-shot split of a coarse category");
  add_head_inputs(split_cmd, split_in);
  add_split_deps(split_cmd, split_in);
  split_cmd->add_option("--method", split_method, "retrieval|joint|alignment|coarse-copy|random")
      ->required();
  split_cmd->add_option("--seed", split_seed, "Seed (required for --method random)");
  split_cmd->add_option("-o,--output", split_out, "Output head directory")->required();

  // align train
  auto* align_cmd = app.add_subcommand("align", "Text-to-weight alignment module");
  align_cmd->require_subcommand(1);
  Inputs align_in;
  std::string align_out;
  std::string align_config;
  std::string align_composition = "mod+cat";
  std::uint64_t align_seed = 0;
  std::optional<std::size_t> align_hidden;
  std::optional<std::size_t> align_batch;
  std::optional<std::size_t> align_epochs;
  std::optional<double> align_lr;
  std::optional<double> align_wd;
  bool align_no_stop = false;
  auto* align_train = align_cmd->add_subcommand("train", "Train the alignment regressor");
  add_head_inputs(align_train, align_in);
  align_train->add_option("--dict", align_in.dict, "Modifier dictionary directory")->required();
  align_train->add_option("--emb", align_in.emb, "Text embedding table document")->required();
  align_train->add_option("--composition", align_composition, "Training pairs: mod|mod+cat")
      ->capture_default_str();
  align_train->add_option("--seed", align_seed, "Seed")->required();
  align_train->add_option("--config", align_config, "Config document (\"alignment\" section)");
  align_train->add_option("--hidden", align_hidden, "Hidden width");
  align_train->add_option("--lr", align_lr, "Peak learning rate");
  align_train->add_option("--weight-decay", align_wd, "AdamW weight decay");
  align_train->add_option("--batch", align_batch, "Batch size");
  align_train->add_option("--epochs", align_epochs, "Maximum epochs");
  align_train->add_flag("--no-early-stop", align_no_stop, "Train for all epochs");
  align_train->add_option("-o,--output", align_out, "Output directory")->required();

  // finetune
  Inputs ft_in;
  std::string ft_train;
  std::string ft_val;
  std::string ft_out;
  std::string ft_config;
  std::optional<std::string> ft_init;
  std::optional<std::string> ft_scope;
  std::optional<std::size_t> ft_shots;
  std::optional<std::size_t> ft_batch;
  std::optional<std::size_t> ft_epochs;
  std::optional<double> ft_lr;
  std::optional<double> ft_wd;
  std::uint64_t ft_seed = 0;
  bool ft_no_stop = false;
  auto* ft_cmd = app.add_subcommand("finetune", "Low-shot isolated fine-tuning of new rows");
  add_head_inputs(ft_cmd, ft_in);
  add_split_deps(ft_cmd, ft_in);
  ft_cmd->add_option("--train", ft_train, "Feature dataset of subcategory samples")->required();
  ft_cmd->add_option("--val", ft_val, "Validation dataset for early stopping");
  ft_cmd->add_option("--init", ft_init, "random|coarse-copy|retrieval|joint|alignment");
  ft_cmd->add_option("--scope", ft_scope, "new-only|head+new");
  ft_cmd->add_option("--shots", ft_shots, "Samples per subcategory");
  ft_cmd->add_option("--lr", ft_lr, "Peak learning rate");
  ft_cmd->add_option("--weight-decay", ft_wd, "AdamW weight decay");
  ft_cmd->add_option("--batch", ft_batch, "Batch size");
  ft_cmd->add_option("--epochs", ft_epochs, "Maximum epochs");
  ft_cmd->add_flag("--no-early-stop", ft_no_stop, "Train for all epochs");
  ft_cmd->add_option("--config", ft_config, "Config document (\"finetune\" section)");
  ft_cmd->add_option("--seed", ft_seed, "Seed")->required();
  ft_cmd->add_option("-o,--output", ft_out, "Output head directory")->required();

  // eval
  std::string ev_taxonomy;
  std::string ev_original;
  std::string ev_bias;
  std::vector<std::string> ev_edited;
  std::string ev_data;
  std::string ev_out;
  auto* ev_cmd = app.add_subcommand("eval", "Generality and locality of edited heads");
  ev_cmd->add_option("--taxonomy", ev_taxonomy, "Taxonomy document")->required();
  ev_cmd->add_option("--original", ev_original, "Original head (directory, json or .cspl)")
      ->required();
  ev_cmd->add_option("--bias", ev_bias, "Bias tensor for a .cspl original head");
  ev_cmd->add_option("--edited", ev_edited, "Edited head directory (repeatable, one per split)")
      ->required();
  ev_cmd->add_option("--eval", ev_data, "Evaluation feature dataset")->required();
  ev_cmd->add_option("-o,--output", ev_out, "Report document")->required();

  // baseline vlm
  auto* base_cmd = app.add_subcommand("baseline", "Reference baselines");
  base_cmd->require_subcommand(1);
  Inputs vlm_in;
  std::string vlm_data;
  std::string vlm_video;
  std::string vlm_out;
  auto* vlm_cmd = base_cmd->add_subcommand(
      "vlm", "Reassign coarse predictions by video-text similarity");
  add_head_inputs(vlm_cmd, vlm_in);
  vlm_cmd->add_option("--emb", vlm_in.emb, "Text embedding table document")->required();
  vlm_cmd->add_option("--coarse", vlm_in.coarse, "Split target");
  vlm_cmd->add_option("--eval", vlm_data, "Evaluation feature dataset")->required();
  vlm_cmd->add_option("--video", vlm_video, "Video embeddings tensor, one row per eval sample")
      ->required();
  vlm_cmd->add_option("-o,--output", vlm_out, "Report document")->required();

  // synth gen
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic benchmark");
  synth_cmd->require_subcommand(1);
  std::string synth_config;
  std::string synth_out;
  std::uint64_t synth_seed = 0;
  auto* synth_gen = synth_cmd->add_subcommand("gen", "Generate a seeded synthetic bundle");
  synth_gen->add_option("--config", synth_config, "Config document (\"synth\" section)");
  synth_gen->add_option("--seed", synth_seed, "Seed")->required();
  synth_gen->add_option("-o,--output", synth_out, "Output directory")->required();

  // pipeline
  std::string pipe_config;
  std::string pipe_out;
  std::uint64_t pipe_seed = 0;
  std::optional<std::string> pipe_method;
  std::optional<std::string> pipe_composition;
  std::optional<std::string> pipe_init;
  std::optional<std::string> pipe_scope;
  std::optional<std::size_t> pipe_shots;
  bool pipe_lowshot = false;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Generate, split and evaluate in one seeded run");
  pipe_cmd->add_option("--config", pipe_config, "Pipeline config document");
  pipe_cmd->add_option("--seed", pipe_seed, "Seed")->required();
  pipe_cmd->add_option("--method", pipe_method, "Zero-shot split method");
  pipe_cmd->add_option("--composition", pipe_composition, "Alignment pairs: mod|mod+cat");
  pipe_cmd->add_flag("--lowshot", pipe_lowshot, "Fine-tune new rows after initialization");
  pipe_cmd->add_option("--init", pipe_init, "Low-shot initialization");
  pipe_cmd->add_option("--scope", pipe_scope, "Low-shot scope: new-only|head+new");
  pipe_cmd->add_option("--shots", pipe_shots, "Low-shot samples per subcategory");
  pipe_cmd->add_option("-o,--output", pipe_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (tax_validate->parsed()) {
      const auto t = load_taxonomy(tax_path);
      std::cout << "categories=" << t.categories().size() << " groups=" << t.groups().size()
                << " splits=" << t.splits().size() << '\n';
    } else if (dict_build->parsed()) {
      const auto t = load_taxonomy(dict_in.taxonomy);
      const auto head = load_head_arg(dict_in.head, dict_in.bias, t);
      const auto dict = build_dictionary(head, t);
      save_dictionary(dict, dict_out);
      log("wrote dictionary to " + dict_out);
      std::cout << "entries=" << dict.entries.size() << " groups=" << dict.coarse_vectors.size()
                << '\n';
    } else if (split_cmd->parsed()) {
      const auto method = parse_init_method(split_method);
      if (method == InitMethod::random && !split_seed) {
        throw ValidationError("method random requires --seed");
      }
      const auto t = load_taxonomy(split_in.taxonomy);
      const auto head = load_head_arg(split_in.head, split_in.bias, t);
      const auto& spec = choose_split(t, split_in.coarse);
      LoadedDeps deps;
      load_deps(split_in, deps);
      const auto edited = split_head(head, spec, method, deps.deps, split_seed.value_or(0));
      save_edited_head(edited, split_out);
      log("wrote edited head to " + split_out);
      std::cout << "split=" << spec.coarse_id << " method=" << split_method
                << " labels=" << edited.head.size() << '\n';
    } else if (align_train->parsed()) {
      AlignmentConfig cfg;
      if (!align_config.empty()) apply_alignment_config(section(read_document(align_config), "alignment"), cfg);
      override_with(align_hidden, cfg.hidden);
      override_with(align_lr, cfg.lr);
      override_with(align_wd, cfg.weight_decay);
      override_with(align_batch, cfg.batch);
      override_with(align_epochs, cfg.max_epochs);
      if (align_no_stop) cfg.early_stopping = false;
      cfg.seed = align_seed;
      const auto composition = parse_composition(align_composition);
      const auto t = load_taxonomy(align_in.taxonomy);
      const auto head = load_head_arg(align_in.head, align_in.bias, t);
      const auto dict = load_dictionary(align_in.dict);
      const auto emb = load_embedding_table(align_in.emb);
      const auto pairs = build_training_pairs(dict, head, t, emb, composition);
      const auto result = train_alignment(pairs, cfg);
      save_alignment_model(result.model, cfg, align_out);
      const auto& last = result.history.epochs.back();
      log("trained on " + std::to_string(pairs.size()) + " pairs for " +
          std::to_string(result.history.epochs.size()) + " epochs");
      std::cout << "pairs=" << pairs.size() << " epochs=" << result.history.epochs.size()
                << " loss=" << format("%.6g", last.loss) << " cosine=" << format("%.4f", last.metric)
                << '\n';
    } else if (ft_cmd->parsed()) {
      FinetuneConfig cfg;
      if (!ft_config.empty()) {
        const auto file = read_document(ft_config);
        const auto& doc = section(file, "finetune");
        cfg.shots = doc.value("shots", cfg.shots);
        if (doc.contains("scope")) cfg.scope = parse_scope(doc.at("scope").get<std::string>());
        if (doc.contains("init")) cfg.init = parse_init_method(doc.at("init").get<std::string>());
        apply_train_config(doc, cfg.train);
      }
      if (ft_init) cfg.init = parse_init_method(*ft_init);
      if (ft_scope) cfg.scope = parse_scope(*ft_scope);
      override_with(ft_shots, cfg.shots);
      override_with(ft_lr, cfg.train.lr);
      override_with(ft_wd, cfg.train.weight_decay);
      override_with(ft_batch, cfg.train.batch);
      override_with(ft_epochs, cfg.train.max_epochs);
      if (ft_no_stop) cfg.train.early_stopping = false;
      cfg.train.seed = ft_seed;
      const auto t = load_taxonomy(ft_in.taxonomy);
      const auto head = load_head_arg(ft_in.head, ft_in.bias, t);
      const auto& spec = choose_split(t, ft_in.coarse);
      LoadedDeps deps;
      load_deps(ft_in, deps);
      const auto train = load_feature_dataset(ft_train);
      std::optional<FeatureDataset> val;
      if (!ft_val.empty()) val = load_feature_dataset(ft_val);
      const auto result =
          finetune_split(head, spec, train, cfg, deps.deps, val ? &*val : nullptr);
      save_edited_head(result.edited, ft_out);
      log("fine-tuned " + std::to_string(result.shot_indices.size()) + " samples for " +
          std::to_string(result.history.epochs.size()) + " epochs");
      std::cout << "split=" << spec.coarse_id << " init=" << init_method_name(cfg.init)
                << " scope=" << scope_name(cfg.scope) << " shots=" << cfg.shots
                << " epochs=" << result.history.epochs.size() << '\n';
    } else if (ev_cmd->parsed()) {
      const auto t = load_taxonomy(ev_taxonomy);
      const auto original = load_head_arg(ev_original, ev_bias, t);
      const auto data = load_feature_dataset(ev_data);
      std::vector<SplitMetrics> metrics;
      for (const auto& path : ev_edited) {
        const auto edited = load_edited_head(path);
        if (edited.coarse_id.empty()) {
          throw ValidationError("'" + path + "' carries no edit section");
        }
        metrics.push_back(evaluate_split(original, edited, t.split_for(edited.coarse_id), data));
      }
      const auto report = aggregate(metrics, &t);
      save_report(report, ev_out);
      log("wrote report to " + ev_out);
      std::cout << summary_line(report) << '\n';
    } else if (vlm_cmd->parsed()) {
      const auto t = load_taxonomy(vlm_in.taxonomy);
      const auto head = load_head_arg(vlm_in.head, vlm_in.bias, t);
      const auto& spec = choose_split(t, vlm_in.coarse);
      const auto emb = load_embedding_table(vlm_in.emb);
      const auto data = load_feature_dataset(vlm_data);
      const auto video = load_tensor(vlm_video).to_matrix();
      const auto base = predict_labels(head, data.features);
      const auto assigned =
          vlm_baseline_assign(base, video, spec.subcategories, emb, spec.coarse_id);
      const auto g = generality_from_predictions(assigned, data.labels, spec);
      const auto l =
          locality_from_predictions(base, assigned, data.labels, head.labels, spec.coarse_id);
      SplitMetrics m;
      m.split_id = spec.coarse_id;
      m.method = "vlm-baseline";
      m.generality = g.value();
      m.locality = l.value();
      m.generality_samples = g.total;
      m.locality_samples = l.total;
      const auto report = aggregate(std::span(&m, 1), &t);
      save_report(report, vlm_out);
      log("wrote report to " + vlm_out);
      std::cout << summary_line(report) << '\n';
    } else if (synth_gen->parsed()) {
      SynthConfig cfg;
      if (!synth_config.empty()) {
        cfg = SynthConfig::from_document(section(read_document(synth_config), "synth"));
      }
      cfg.seed = synth_seed;
      const auto bundle = generate(cfg);
      write_bundle(bundle, synth_out);
      log("wrote synthetic bundle to " + synth_out);
      std::cout << "categories=" << bundle.taxonomy.categories().size()
                << " train=" << bundle.train.size() << " eval=" << bundle.eval.size()
                << " oracle_accuracy=" << format("%.4f", bundle.oracle_accuracy) << '\n';
    } else if (pipe_cmd->parsed()) {
      PipelineConfig cfg;
      if (!pipe_config.empty()) cfg = pipeline_config_from_document(read_document(pipe_config));
      cfg.synth.seed = pipe_seed;
      if (pipe_method) cfg.method = parse_init_method(*pipe_method);
      if (pipe_composition) cfg.composition = parse_composition(*pipe_composition);
      if (pipe_lowshot) cfg.lowshot = true;
      if (pipe_init) cfg.finetune.init = parse_init_method(*pipe_init);
      if (pipe_scope) cfg.finetune.scope = parse_scope(*pipe_scope);
      override_with(pipe_shots, cfg.finetune.shots);
      const auto bundle = generate(cfg.synth);
      const auto outcome = run_pipeline(bundle, cfg);
      auto metrics = outcome.metrics;
      const auto report = aggregate(std::span(&metrics, 1), &bundle.taxonomy);
      fs::create_directories(pipe_out);
      save_report(report, fs::path(pipe_out) / "report.json");
      save_edited_head(outcome.edited, fs::path(pipe_out) / "edited_head");
      Document run;
      run["seed"] = pipe_seed;
      run["method"] = metrics.method;
      run["composition"] = std::string(composition_name(cfg.composition));
      run["synth"] = cfg.synth.to_document();
      run["oracle_split_accuracy"] = bundle.oracle_split_accuracy;
      run["oracle_accuracy"] = bundle.oracle_accuracy;
      run["oracle_gap"] = outcome.oracle_gap;
      write_document(run, fs::path(pipe_out) / "run.json");
      log("wrote report to " + (fs::path(pipe_out) / "report.json").string());
      std::cout << summary_line(report) << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "catsplit: error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "catsplit: error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "catsplit: error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "catsplit: error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace catsplit::cli
