// helmnet command-line tool: synth / split / augment / train / eval /
// predict / inspect / grid. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 runtime/numerical error. Stdout carries data, stderr diagnostics.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "helmnet/augment.hpp"
#include "helmnet/checkpoint.hpp"
#include "helmnet/common.hpp"
#include "helmnet/dataset.hpp"
#include "helmnet/image.hpp"
#include "helmnet/metrics.hpp"
#include "helmnet/model.hpp"
#include "helmnet/optim.hpp"
#include "helmnet/trainer.hpp"

namespace fs = std::filesystem;
using namespace helmnet;

namespace {

void echo_config(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cout << "resolved config:\n";
  for (const auto& [k, v] : kv) std::cout << "  " << k << "=" << v << "\n";
  std::cout.flush();
}

SplitRatios parse_ratios(const std::string& text) {
  std::vector<double> parts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(std::stod(item));
  if (parts.size() != 3)
    throw ContractError("--ratios needs exactly 3 comma-separated values");
  SplitRatios r{parts[0], parts[1], parts[2]};
  r.validate();
  return r;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void print_fit_summary(const FitResult& res) {
  std::cout << kEpochLogHeader << "\n";
  for (const EpochLog& el : res.logs) std::cout << epoch_log_row(el) << "\n";
  std::printf("final train accuracy: %.2f%%\n", res.final_train_accuracy);
  std::printf("final val accuracy:   %.2f%%\n", res.final_val_accuracy);
  std::printf("best val accuracy:    %.2f%% (epoch %zu)\n",
              res.best_val_accuracy, res.best_epoch);
  std::cout << "validation report:\n"
            << format_report(res.validation_report)
            << format_confusion(res.validation_report.confusion);
  std::cout << "test report:\n"
            << format_report(res.test_report)
            << format_confusion(res.test_report.confusion);
}

int run_synth(const std::string& out, std::size_t per_class, int size,
              std::uint64_t seed) {
  echo_config({{"subcommand", "synth"},
               {"out", out},
               {"per_class", std::to_string(per_class)},
               {"size", std::to_string(size)},
               {"seed", std::to_string(seed)}});
  generate_synthetic_corpus(per_class, size, seed, out);
  std::cout << "wrote " << 2 * per_class << " images under " << out << "\n";
  return 0;
}

int run_split(const std::string& in, const std::string& out,
              const std::string& ratios_text, std::uint64_t seed, int size) {
  SplitRatios ratios = parse_ratios(ratios_text);
  echo_config({{"subcommand", "split"},
               {"in", in},
               {"out", out},
               {"ratios", ratios_text},
               {"seed", std::to_string(seed)},
               {"size", std::to_string(size)}});
  CorpusLoadReport corpus = load_corpus(in, size);
  for (const auto& e : corpus.errors)
    std::cerr << "warning: skipped undecodable file: " << e << "\n";
  DatasetSplit split = stratified_split(corpus.samples, ratios, seed);
  write_split_manifest(out, split);
  std::cout << "train=" << split.train.size()
            << " val=" << split.validation.size()
            << " test=" << split.test.size() << " -> " << out << "\n";
  return 0;
}

int run_augment(const std::string& in, const std::string& out,
                const std::string& plan_path, std::uint64_t seed) {
  AugmentPlan plan =
      plan_path.empty() ? default_plan(seed) : parse_plan(read_text_file(plan_path));
  plan.seed = seed;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"subcommand", "augment"},
      {"in", in},
      {"out", out},
      {"plan", plan_path.empty() ? "<default>" : plan_path},
      {"seed", std::to_string(seed)},
      {"include_original", plan.include_original ? "1" : "0"}};
  for (const AugmentOp& op : plan.ops) kv.emplace_back("op", op.describe());
  echo_config(kv);

  std::vector<SourceImage> sources;
  for (const auto& [path, label] : list_class_files(in)) {
    SourceImage s;
    s.image = read_ppm_file(path);
    s.label = label;
    s.stem = fs::path(path).stem().string();
    sources.push_back(std::move(s));
  }
  std::vector<AugmentedImage> expanded = expand_dataset(sources, plan);
  for (const AugmentedImage& a : expanded) {
    fs::path dir = fs::path(out) / label_name(a.label);
    fs::create_directories(dir);
    write_ppm_file((dir / a.filename).string(), a.image);
  }
  std::cout << "expanded " << sources.size() << " images to "
            << expanded.size() << " under " << out << "\n";
  return 0;
}

int run_train(const TrainConfig& cfg, const std::optional<std::string>& resume) {
  auto kv = cfg.to_kv();
  kv.insert(kv.begin(), {"subcommand", "train"});
  if (resume) kv.emplace_back("resume", *resume);
  echo_config(kv);
  FitResult res = fit(cfg, resume);
  print_fit_summary(res);
  return 0;
}

int run_eval(const std::string& ckpt_path, const std::string& data,
             const std::string& subset) {
  RestoredModel restored = restore_model(ckpt_path);
  echo_config({{"subcommand", "eval"},
               {"checkpoint", ckpt_path},
               {"data", data},
               {"subset", subset},
               {"image_size", std::to_string(restored.config.model.input_size)},
               {"seed", std::to_string(restored.config.seed)}});
  CorpusLoadReport corpus =
      load_corpus(data, static_cast<int>(restored.config.model.input_size));
  for (const auto& e : corpus.errors)
    std::cerr << "warning: skipped undecodable file: " << e << "\n";
  DatasetSplit split = stratified_split(corpus.samples, restored.config.ratios,
                                        restored.config.seed);
  std::size_t bs = restored.config.batch_size;
  EvalResult train_eval = evaluate(*restored.model, split.train, bs);
  EvalResult val_eval = evaluate(*restored.model, split.validation, bs);
  double train_pct = train_eval.accuracy * 100.0;
  double val_pct = val_eval.accuracy * 100.0;

  auto print_subset = [&](const std::string& name,
                          const std::vector<Sample>& samples) {
    EvalResult r = name == "train" ? train_eval
                 : name == "val"   ? val_eval
                                   : evaluate(*restored.model, samples, bs);
    std::cout << name << " subset (" << samples.size() << " samples):\n"
              << format_report(report(r.confusion, train_pct, val_pct))
              << format_confusion(r.confusion);
  };
  if (subset == "all" || subset == "train") print_subset("train", split.train);
  if (subset == "all" || subset == "val") print_subset("val", split.validation);
  if (subset == "all" || subset == "test") print_subset("test", split.test);
  return 0;
}

int run_predict(const std::string& ckpt_path,
                const std::vector<std::string>& images) {
  RestoredModel restored = restore_model(ckpt_path);
  std::size_t s = restored.config.model.input_size;
  echo_config({{"subcommand", "predict"},
               {"checkpoint", ckpt_path},
               {"image_size", std::to_string(s)}});
  for (const std::string& path : images) {
    Image img = resize_bilinear(read_ppm_file(path), static_cast<int>(s),
                                static_cast<int>(s));
    Tensor input = Tensor::from({1, 3, s, s}, std::vector<float>(3 * s * s));
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < s; ++y)
        for (std::size_t x = 0; x < s; ++x)
          input[(c * s + y) * s + x] =
              img.at(static_cast<int>(x), static_cast<int>(y),
                     static_cast<int>(c)) /
              255.0f;
    Tensor logits = restored.model->forward(input, Mode::kEval);
    std::vector<double> p = softmax_row(logits.data(), Model::kNumClasses);
    int pred = p[1] > p[0] ? 1 : 0;
    std::printf("%s: %s (helmet %.4f, no_helmet %.4f)\n", path.c_str(),
                label_name(pred), p[1], p[0]);
  }
  return 0;
}

int run_inspect(const std::string& ckpt_path, const std::string& variant,
                bool batchnorm, float dropout, const std::string& csv_path) {
  ModelConfig mc;
  if (!ckpt_path.empty()) {
    mc = restore_model(ckpt_path).config.model;
  } else {
    mc.variant = parse_variant(variant);
    mc.use_batchnorm = batchnorm;
    mc.dropout_rate = dropout;
  }
  echo_config({{"subcommand", "inspect"},
               {"variant", variant_name(mc.variant)},
               {"batchnorm", mc.use_batchnorm ? "1" : "0"},
               {"dropout", std::to_string(mc.dropout_rate)}});
  Model model(mc);
  std::vector<SummaryRow> rows = model.summarize();

  std::printf("%-18s %-14s %12s  %s\n", "layer", "output_shape", "params",
              "note");
  for (const SummaryRow& r : rows) {
    std::string params = r.params ? std::to_string(*r.params) : "";
    std::printf("%-18s %-14s %12s  %s\n", r.layer.c_str(),
                r.output_shape.c_str(), params.c_str(), r.note.c_str());
  }

  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw DataError("cannot write " + csv_path);
    f << "layer,output_shape,params,note\n";
    for (const SummaryRow& r : rows)
      f << r.layer << ",\"" << r.output_shape << "\","
        << (r.params ? std::to_string(*r.params) : "") << ",\"" << r.note
        << "\"\n";
  }
  return 0;
}

int run_grid(const TrainConfig& base, const std::string& grid_path,
             const std::string& out_path) {
  GridSpec grid = parse_grid(read_text_file(grid_path));
  auto kv = base.to_kv();
  kv.insert(kv.begin(), {"subcommand", "grid"});
  kv.emplace_back("grid_file", grid_path);
  kv.emplace_back("grid_out", out_path);
  echo_config(kv);
  std::string csv = run_experiment_grid(base, grid);
  std::ofstream f(out_path);
  if (!f) throw DataError("cannot write " + out_path);
  f << csv;
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helmet-classification CNN toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (never changes numbers)")
      ->capture_default_str();
  app.fallthrough();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic PPM corpus");
  std::string synth_out;
  std::size_t per_class = 150;
  int synth_size = 64;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--per-class", per_class)->capture_default_str();
  synth->add_option("--size", synth_size)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();

  // split
  auto* split = app.add_subcommand("split", "stratified split manifest");
  std::string split_in, split_out, split_ratios = "0.7,0.2,0.1";
  std::uint64_t split_seed = 0;
  int split_size = 32;
  split->add_option("--in", split_in)->required();
  split->add_option("--out", split_out)->required();
  split->add_option("--ratios", split_ratios)->capture_default_str();
  split->add_option("--seed", split_seed)->capture_default_str();
  split->add_option("--size", split_size)->capture_default_str();

  // augment
  auto* augment = app.add_subcommand("augment", "expand a corpus offline");
  std::string aug_in, aug_out, aug_plan;
  std::uint64_t aug_seed = 0;
  augment->add_option("--in", aug_in)->required();
  augment->add_option("--out", aug_out)->required();
  augment->add_option("--plan", aug_plan, "plan file (default: built-in plan)");
  augment->add_option("--seed", aug_seed)->capture_default_str();

  // shared train/grid config flags
  auto add_config_flags = [](CLI::App* cmd, std::optional<std::string>& config_file,
                             std::vector<std::pair<std::string, std::optional<std::string>>>& overrides) {
    cmd->add_option("--config", config_file, "key=value config file");
    static const char* keys[] = {"variant", "batchnorm", "dropout",
                                 "image_size", "batch_size", "learning_rate",
                                 "epochs", "momentum", "seed", "data_root",
                                 "log_path", "checkpoint_path"};
    overrides.reserve(std::size(keys));
    for (const char* key : keys) {
      overrides.emplace_back(key, std::nullopt);
      auto& slot = overrides.back().second;
      std::string flag = "--" + std::string(key);
      for (auto& c : flag)
        if (c == '_') c = '-';
      cmd->add_option(flag, slot, std::string("overrides config key ") + key);
    }
  };
  auto resolve_config = [](const std::optional<std::string>& config_file,
                           const std::vector<std::pair<std::string, std::optional<std::string>>>& overrides,
                           const std::optional<std::string>& ratios_text) {
    TrainConfig cfg =
        config_file ? TrainConfig::from_file(*config_file) : TrainConfig{};
    for (const auto& [key, value] : overrides)
      if (value) cfg.apply(key, *value);
    if (ratios_text) {
      SplitRatios r = parse_ratios(*ratios_text);
      cfg.ratios = r;
    }
    cfg.ratios.validate();
    return cfg;
  };

  // train
  auto* train = app.add_subcommand("train", "train a model");
  std::optional<std::string> train_cfg_file, train_ratios, train_resume;
  std::vector<std::pair<std::string, std::optional<std::string>>> train_overrides;
  add_config_flags(train, train_cfg_file, train_overrides);
  train->add_option("--ratios", train_ratios, "train,val,test ratios");
  train->add_option("--resume", train_resume, "checkpoint to resume from");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_ckpt, eval_data, eval_subset = "test";
  eval->add_option("--checkpoint", eval_ckpt)->required();
  eval->add_option("--data", eval_data)->required();
  eval->add_option("--subset", eval_subset, "train|val|test|all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}))
      ->capture_default_str();

  // predict
  auto* predict = app.add_subcommand("predict", "classify PPM images");
  std::string pred_ckpt;
  std::vector<std::string> pred_images;
  predict->add_option("--checkpoint", pred_ckpt)->required();
  predict->add_option("--image", pred_images)->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print the layer table");
  std::string ins_ckpt, ins_variant = "final", ins_csv;
  bool ins_bn = false;
  float ins_dropout = 0.0f;
  inspect->add_option("--checkpoint", ins_ckpt, "read config from a checkpoint");
  inspect->add_option("--variant", ins_variant)->capture_default_str();
  inspect->add_flag("--batchnorm", ins_bn);
  inspect->add_option("--dropout", ins_dropout)->capture_default_str();
  inspect->add_option("--csv", ins_csv, "also write the table as CSV");

  // grid
  auto* grid = app.add_subcommand("grid", "run an experiment grid");
  std::optional<std::string> grid_cfg_file, grid_ratios;
  std::vector<std::pair<std::string, std::optional<std::string>>> grid_overrides;
  std::string grid_file, grid_out = "grid.csv";
  add_config_flags(grid, grid_cfg_file, grid_overrides);
  grid->add_option("--ratios", grid_ratios, "train,val,test ratios");
  grid->add_option("--grid", grid_file)->required();
  grid->add_option("--out", grid_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    set_thread_count(threads);
    if (*synth) return run_synth(synth_out, per_class, synth_size, synth_seed);
    if (*split)
      return run_split(split_in, split_out, split_ratios, split_seed, split_size);
    if (*augment) return run_augment(aug_in, aug_out, aug_plan, aug_seed);
    if (*train)
      return run_train(resolve_config(train_cfg_file, train_overrides, train_ratios),
                       train_resume);
    if (*eval) return run_eval(eval_ckpt, eval_data, eval_subset);
    if (*predict) return run_predict(pred_ckpt, pred_images);
    if (*inspect)
      return run_inspect(ins_ckpt, ins_variant, ins_bn, ins_dropout, ins_csv);
    if (*grid)
      return run_grid(resolve_config(grid_cfg_file, grid_overrides, grid_ratios),
                      grid_file, grid_out);
    return 1;
  } catch (const ContractError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
