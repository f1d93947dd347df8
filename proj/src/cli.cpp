// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mvfsad/anomaly_synth.hpp"
#include "mvfsad/checkpoint.hpp"
#include "mvfsad/config.hpp"
#include "mvfsad/dataset.hpp"
#include "mvfsad/errors.hpp"
#include "mvfsad/evaluate.hpp"
#include "mvfsad/gradcheck.hpp"
#include "mvfsad/image_io.hpp"
#include "mvfsad/point_grid_io.hpp"
#include "mvfsad/prompts.hpp"
#include "mvfsad/toy_data.hpp"

namespace mvfsad {

namespace fs = std::filesystem;

namespace {

// Options shared by the commands that build a model.
struct ModelOptions {
  std::string config_path;
  std::string class_name;
  std::string data_root;
  bool no_multiview = false;
  std::string normal_prompts;
  std::string anomalous_prompts;

  void add(CLI::App* cmd, bool with_data = true) {
    cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--class", class_name, "object class (dataset sub-directory and prompt class name)");
    if (with_data) cmd->add_option("--data-root", data_root, "dataset root (default: $MVFSAD_DATA_ROOT or ./data)");
    cmd->add_flag("--no-multiview", no_multiview, "disable the multi-view fusion branches");
    cmd->add_option("--normal-prompts", normal_prompts, "file with normal prompt templates")->check(CLI::ExistingFile);
    cmd->add_option("--anomalous-prompts", anomalous_prompts, "file with anomalous prompt templates")
        ->check(CLI::ExistingFile);
  }

  RunConfig run_config() const {
    RunConfig rc = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    apply(rc.model);
    return rc;
  }

  void apply(ModelConfig& m) const {
    if (!class_name.empty()) m.class_name = class_name;
    if (no_multiview) m.use_multiview = false;
    if (!normal_prompts.empty()) m.normal_prompts = load_prompt_file(normal_prompts, m.class_name).prompts;
    if (!anomalous_prompts.empty()) m.anomalous_prompts = load_prompt_file(anomalous_prompts, m.class_name).prompts;
    m.validate();
  }

  std::string root() const { return data_root.empty() ? default_data_root() : data_root; }
  std::string dataset_class(const ModelConfig& m) const { return class_name.empty() ? m.class_name : class_name; }
};

std::vector<int> parse_view_list(const std::string& text) {
  std::vector<int> out;
  if (text == "all") {
    for (int i = 1; i <= 27; ++i) out.push_back(i);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InvalidArgument("bad view index '" + item + "'");
    }
  }
  return out;
}

std::string view_file_name(int index) {
  std::ostringstream os;
  os << "view_" << std::setw(2) << std::setfill('0') << index << ".png";
  return os.str();
}

std::vector<EvalInput> load_eval_inputs(const std::string& root, const std::string& cls, int size) {
  std::vector<EvalInput> inputs;
  for (const auto& s : list_samples(root, cls, "test")) {
    LoadedSample ls = load_sample(s, size);
    EvalInput in;
    in.id = s.defect + "/" + s.name;
    in.image = std::move(ls.image);
    in.cloud = std::move(ls.cloud);
    in.mask = std::move(ls.mask);
    in.label = s.label();
    inputs.push_back(std::move(in));
  }
  if (inputs.empty()) throw IoError("no test samples under " + root + "/" + cls + "/test");
  return inputs;
}

Checkpoint load_for_inference(const std::string& path, const ModelOptions& mo) {
  Checkpoint ck = load_checkpoint(path);
  if (!mo.class_name.empty()) ck.config.model.class_name = mo.class_name;
  if (mo.no_multiview) ck.config.model.use_multiview = false;
  if (ck.config.model.use_multiview && !ck.has_fusion) {
    throw InvalidArgument("checkpoint was trained without fusion branches; pass --no-multiview");
  }
  return ck;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot multi-view RGB + point-cloud anomaly detection"};
  app.name("mvfsad");
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize an anomalous copy of an image");
  std::string s_image, s_grid, s_source, s_out_image, s_out_mask, s_out_meta;
  std::uint64_t s_seed = 0;
  std::optional<double> s_beta;
  PerlinParams s_params;
  synth->add_option("--image", s_image, "normal RGB image")->required()->check(CLI::ExistingFile);
  synth->add_option("--grid", s_grid, "point grid (.pgrd) supplying the depth foreground")->required()->check(CLI::ExistingFile);
  synth->add_option("--source", s_source, "anomaly texture image (default: seeded colour noise)")->check(CLI::ExistingFile);
  synth->add_option("--seed", s_seed, "random seed");
  synth->add_option("--beta", s_beta, "fixed opacity in [0, 1] (default: drawn from [0.15, 1))");
  synth->add_option("--period-x", s_params.period_x, "Perlin lattice cells across the width");
  synth->add_option("--period-y", s_params.period_y, "Perlin lattice cells down the height");
  synth->add_option("--octaves", s_params.octaves, "Perlin octaves");
  synth->add_option("--threshold", s_params.threshold, "mask threshold on the normalized field");
  synth->add_option("--out-image", s_out_image, "anomalous image (PNG or PPM)")->required();
  synth->add_option("--out-mask", s_out_mask, "binary mask (PGM or PNG)")->required();
  synth->add_option("--out-meta", s_out_meta, "JSON metadata record")->required();

  // render
  auto* render = app.add_subcommand("render", "render point-cloud views textured with an image");
  std::string r_image, r_grid, r_out_dir, r_views = "all";
  ModelOptions r_model;
  render->add_option("--image", r_image, "texture image")->required()->check(CLI::ExistingFile);
  render->add_option("--grid", r_grid, "point grid (.pgrd)")->required()->check(CLI::ExistingFile);
  render->add_option("--out-dir", r_out_dir, "output directory")->required();
  render->add_option("--views", r_views, "comma-separated 1-based view indices or 'all'");
  render->add_option("--config", r_model.config_path, "JSON config file")->check(CLI::ExistingFile);

  // train
  auto* train = app.add_subcommand("train", "train the adapters, decoder and fusion on K normal shots");
  ModelOptions t_model;
  t_model.add(train);
  std::optional<int> t_shots, t_epochs;
  std::optional<std::uint64_t> t_seed;
  std::string t_out, t_sources;
  bool t_quiet = false;
  train->add_option("--shots", t_shots, "normal shots per class")->check(CLI::IsMember({1, 2, 4}));
  train->add_option("--epochs", t_epochs, "passes over the shots")->check(CLI::NonNegativeNumber);
  train->add_option("--seed", t_seed, "random seed");
  train->add_option("--out", t_out, "checkpoint path")->required();
  train->add_option("--anomaly-sources", t_sources, "directory of texture images for synthetic anomalies")
      ->check(CLI::ExistingDirectory);
  train->add_flag("--quiet", t_quiet, "no per-step progress");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  ModelOptions e_model;
  e_model.add(eval);
  std::string e_ckpt, e_report, e_csv;
  double e_fpr = kDefaultFprLimit;
  eval->add_option("--checkpoint", e_ckpt, "trained checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", e_report, "JSON report path (default: stdout)");
  eval->add_option("--csv", e_csv, "per-sample scores as CSV");
  eval->add_option("--fpr-limit", e_fpr, "AUPRO integration limit")->check(CLI::Range(1e-9, 1.0));

  // infer
  auto* infer = app.add_subcommand("infer", "write anomaly maps and scores");
  ModelOptions i_model;
  i_model.add(infer);
  std::string i_ckpt, i_image, i_grid, i_out_dir;
  infer->add_option("--checkpoint", i_ckpt, "trained checkpoint")->required()->check(CLI::ExistingFile);
  infer->add_option("--image", i_image, "single RGB image (otherwise the whole test split)")->check(CLI::ExistingFile);
  infer->add_option("--grid", i_grid, "point grid for --image")->check(CLI::ExistingFile);
  infer->add_option("--out-dir", i_out_dir, "output directory for maps and scores.csv")->required();

  // gradcheck
  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the trainable components");
  bool g_all = false;
  std::vector<std::string> g_components;
  GradCheckOptions g_opts;
  double g_tol = 1e-4;
  grad->add_flag("--all", g_all, "check every component");
  grad->add_option("--component", g_components, "component id (repeatable)");
  grad->add_option("--eps", g_opts.eps, "finite-difference step");
  grad->add_option("--seed", g_opts.seed, "probe seed");
  grad->add_option("--tolerance", g_tol, "maximum accepted relative error");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "metrics from saved scores and maps");
  std::string m_scores, m_maps, m_masks;
  double m_fpr = kDefaultFprLimit;
  metrics->add_option("--scores", m_scores, "CSV with label and a_score columns")->check(CLI::ExistingFile);
  metrics->add_option("--maps", m_maps, "directory of anomaly maps")->check(CLI::ExistingDirectory);
  metrics->add_option("--masks", m_masks, "directory of masks with matching file names")->check(CLI::ExistingDirectory);
  metrics->add_option("--fpr-limit", m_fpr, "AUPRO integration limit")->check(CLI::Range(1e-9, 1.0));

  // toy
  auto* toy = app.add_subcommand("toy", "write a procedural toy dataset");
  ToyConfig toy_cfg;
  std::string toy_root, toy_class = "toy";
  toy->add_option("--out", toy_root, "dataset root")->required();
  toy->add_option("--class", toy_class, "class directory name");
  toy->add_option("--seed", toy_cfg.seed, "dataset seed");
  toy->add_option("--size", toy_cfg.size, "image side length");
  toy->add_option("--train", toy_cfg.train_shots, "normal training samples");
  toy->add_option("--test-normal", toy_cfg.test_normal, "normal test samples");
  toy->add_option("--test-anomalous", toy_cfg.test_anomalous, "anomalous test samples");

  std::vector<std::string> argv_store{"mvfsad"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      s_params.validate();
      const Image image = read_image(s_image);
      const PointCloudGrid grid = read_point_grid(s_grid);
      if (grid.height != image.height || grid.width != image.width) {
        throw IoError("image and point grid sizes differ");
      }
      const Image source = s_source.empty() ? procedural_noise_texture(image.height, image.width, derive_seed(s_seed, "texture"))
                                            : resize_bilinear(read_image(s_source), image.height, image.width);
      const ScalarMap depth = depth_from_cloud(grid);
      const AnomalySample a = s_beta ? synthesize_anomaly_with_beta(image, depth, source, s_params, s_seed, *s_beta)
                                     : synthesize_anomaly(image, depth, source, s_params, s_seed);
      write_image(s_out_image, a.x_minus);
      write_mask(s_out_mask, a.mask);
      const nlohmann::json meta = {{"seed", a.seed},
                                   {"beta", a.beta},
                                   {"params",
                                    {{"period_x", a.params.period_x},
                                     {"period_y", a.params.period_y},
                                     {"octaves", a.params.octaves},
                                     {"persistence", a.params.persistence},
                                     {"threshold", a.params.threshold}}},
                                   {"empty_mask", a.empty_mask},
                                   {"empty_foreground", a.empty_foreground}};
      std::ofstream(s_out_meta) << meta.dump(2) << "\n";
      if (a.empty_mask) err << "warning: synthetic mask is empty\n";
      return kExitOk;
    }

    if (render->parsed()) {
      const RunConfig rc = r_model.run_config();
      const Image image = read_image(r_image);
      const PointCloudGrid grid = read_point_grid(r_grid);
      const RenderSettings settings = rc.model.render_settings();
      const ViewRig rig = make_view_rig(grid, settings);
      const auto angles = view_grid(rc.model.view_angles);
      const auto indices = parse_view_list(r_views);
      if (image.height != grid.height || image.width != grid.width) throw IoError("image and point grid sizes differ");
      const auto views = render_selected(rig.cloud, image, angles, indices, rig.camera, settings);
      fs::create_directories(r_out_dir);
      std::ofstream manifest(fs::path(r_out_dir) / "manifest.txt");
      manifest << "# view file theta_x theta_y theta_z\n" << std::setprecision(17);
      for (std::size_t k = 0; k < views.size(); ++k) {
        const std::string name = view_file_name(indices[k]);
        write_image((fs::path(r_out_dir) / name).string(), views[k].image);
        const auto& a = angles[indices[k] - 1];
        manifest << indices[k] << " " << name << " " << a.theta_x << " " << a.theta_y << " " << a.theta_z << "\n";
      }
      return kExitOk;
    }

    if (train->parsed()) {
      RunConfig rc = t_model.run_config();
      if (t_shots) rc.train.shots = *t_shots;
      if (t_epochs) rc.train.epochs = *t_epochs;
      if (t_seed) rc.train.seed = *t_seed;
      rc.train.validate();
      const std::string cls = t_model.dataset_class(rc.model);
      const auto listed = list_samples(t_model.root(), cls, "train");
      if (static_cast<int>(listed.size()) < rc.train.shots) {
        throw IoError("need " + std::to_string(rc.train.shots) + " training samples, found " +
                      std::to_string(listed.size()));
      }
      std::vector<TrainingShot> shots;
      for (int k = 0; k < rc.train.shots; ++k) {
        LoadedSample ls = load_sample(listed[k], rc.model.encoder.image_size);
        shots.push_back({std::move(ls.image), std::move(ls.cloud)});
      }
      std::vector<Image> sources;
      if (!t_sources.empty()) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(t_sources)) {
          const auto ext = e.path().extension().string();
          if (e.is_regular_file() && (ext == ".png" || ext == ".ppm")) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) sources.push_back(read_image(f.string()));
      }

      const FrozenBackbone backbone(rc.model);
      const std::uint64_t seed = head_seed(rc.train);
      TrainableHead head(rc.model, seed, true);
      Trainer trainer(backbone, head, rc.train, std::move(sources));
      trainer.fit(shots, [&](const StepRecord& r) {
        if (t_quiet) return;
        err << "epoch " << r.epoch + 1 << "/" << rc.train.epochs << " shot " << r.shot << "  l_tot " << r.loss.l_tot
            << "  l_con " << r.loss.l_con << "  l_seg " << r.loss.l_seg << "\n";
      });
      save_checkpoint(t_out, make_checkpoint(head, rc, seed));
      out << "wrote " << t_out << "\n";
      return kExitOk;
    }

    if (eval->parsed()) {
      const Checkpoint ck = load_for_inference(e_ckpt, e_model);
      const FrozenBackbone backbone(ck.config.model);
      const TrainableHead head = head_from_checkpoint(ck);
      const auto inputs = load_eval_inputs(e_model.root(), e_model.dataset_class(ck.config.model),
                                           ck.config.model.encoder.image_size);
      EvalReport report = evaluate(backbone, head, inputs, e_fpr);
      report.config = to_json(ck.config);
      if (e_report.empty()) {
        out << report_to_json(report).dump(2) << "\n";
      } else {
        write_report_json(e_report, report);
      }
      if (!e_csv.empty()) write_scores_csv(e_csv, report);
      return kExitOk;
    }

    if (infer->parsed()) {
      const Checkpoint ck = load_for_inference(i_ckpt, i_model);
      const FrozenBackbone backbone(ck.config.model);
      const TrainableHead head = head_from_checkpoint(ck);
      const int size = ck.config.model.encoder.image_size;
      std::vector<EvalInput> inputs;
      if (!i_image.empty()) {
        if (i_grid.empty()) throw InvalidArgument("--image needs --grid");
        DatasetSample s;
        s.rgb_path = i_image;
        s.grid_path = i_grid;
        LoadedSample ls = load_sample(s, size);
        inputs.push_back({fs::path(i_image).stem().string(), std::move(ls.image), std::move(ls.cloud), {}, 0});
      } else {
        inputs = load_eval_inputs(i_model.root(), i_model.dataset_class(ck.config.model), size);
      }
      fs::create_directories(i_out_dir);
      std::ofstream csv(fs::path(i_out_dir) / "scores.csv");
      csv << "id,s_plus,s_minus,a_score,map\n" << std::setprecision(17);
      for (const auto& in : inputs) {
        const Prediction p = predict(backbone, head, in.image, in.cloud);
        std::string stem = in.id;
        std::replace(stem.begin(), stem.end(), '/', '_');
        const std::string map_name = stem + "_map.png";
        write_map16((fs::path(i_out_dir) / map_name).string(), p.map);
        csv << in.id << ',' << p.score.s_plus << ',' << p.score.s_minus << ',' << p.score.a_score << ',' << map_name
            << '\n';
        out << in.id << " a_score " << p.score.a_score << "\n";
      }
      return kExitOk;
    }

    if (grad->parsed()) {
      if (g_all) g_components = gradcheck_components();
      if (g_components.empty()) {
        err << "error: gradcheck needs --all or --component\n" << grad->help();
        return kExitUsage;
      }
      bool ok = true;
      for (const auto& c : g_components) {
        const GradCheckResult r = grad_check(c, g_opts);
        if (!r.has_parameters) {
          out << r.component << ": " << r.note << "\n";
          continue;
        }
        const bool pass = r.max_rel_error <= g_tol;
        ok = ok && pass;
        out << r.component << ": max rel. error " << std::scientific << std::setprecision(3) << r.max_rel_error
            << std::defaultfloat << " over " << r.entries_checked << " entries " << (pass ? "ok" : "FAIL") << "\n";
      }
      return ok ? kExitOk : kExitFailure;
    }

    if (metrics->parsed()) {
      if (m_scores.empty() && m_maps.empty()) {
        err << "error: metrics needs --scores and/or --maps with --masks\n" << metrics->help();
        return kExitUsage;
      }
      nlohmann::json result;
      if (!m_scores.empty()) {
        std::ifstream in(m_scores);
        std::string line;
        std::getline(in, line);
        std::vector<std::string> header;
        {
          std::stringstream ss(line);
          std::string cell;
          while (std::getline(ss, cell, ',')) header.push_back(cell);
        }
        const auto col = [&](const std::string& name) {
          const auto it = std::find(header.begin(), header.end(), name);
          if (it == header.end()) throw IoError(m_scores + ": missing column " + name);
          return static_cast<std::size_t>(it - header.begin());
        };
        const std::size_t label_col = col("label");
        const std::size_t score_col = col("a_score");
        std::vector<double> scores;
        std::vector<std::uint8_t> labels;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          std::vector<std::string> cells;
          std::stringstream ss(line);
          std::string cell;
          while (std::getline(ss, cell, ',')) cells.push_back(cell);
          if (cells.size() <= std::max(label_col, score_col)) throw IoError(m_scores + ": short row '" + line + "'");
          labels.push_back(std::stoi(cells[label_col]) ? 1 : 0);
          scores.push_back(std::stod(cells[score_col]));
        }
        result["i_auroc"] = auroc(scores, labels);
        result["aupr"] = aupr(scores, labels);
      }
      if (!m_maps.empty()) {
        if (m_masks.empty()) throw InvalidArgument("--maps needs --masks");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(m_maps)) {
          if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        std::vector<ScalarMap> maps;
        std::vector<Mask> masks;
        for (const auto& f : files) {
          const fs::path mask_path = fs::path(m_masks) / f.filename();
          maps.push_back(read_gray(f.string()));
          masks.push_back(fs::exists(mask_path) ? read_mask(mask_path.string())
                                                : Mask(maps.back().height, maps.back().width, 0));
        }
        result["p_auroc"] = p_auroc(maps, masks);
        result["aupro"] = aupro(maps, masks, m_fpr);
      }
      out << result.dump(2) << "\n";
      return kExitOk;
    }

    if (toy->parsed()) {
      const ToyDataset ds = make_toy_dataset(toy_cfg);
      for (const auto& s : ds.train) write_sample(toy_root, toy_class, "train", "good", s.id, s.image, s.cloud, {});
      for (const auto& s : ds.test) {
        write_sample(toy_root, toy_class, "test", s.label ? "blend" : "good", s.id, s.image, s.cloud,
                     s.label ? std::optional<Mask>(s.mask) : std::nullopt);
      }
      out << "wrote " << ds.train.size() << " train and " << ds.test.size() << " test samples under " << toy_root
          << "/" << toy_class << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run_command(const std::vector<std::string>& args) { return run_command(args, std::cout, std::cerr); }

}  // namespace mvfsad
