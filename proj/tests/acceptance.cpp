// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one line per criterion:
//   criterion N: PASS|FAIL  <detail>
// and exits non-zero if any selected criterion fails.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "metric_oracles.hpp"
#include "mvfsad/anomaly_synth.hpp"
#include "mvfsad/checkpoint.hpp"
#include "mvfsad/cli.hpp"
#include "mvfsad/config.hpp"
#include "mvfsad/dataset.hpp"
#include "mvfsad/evaluate.hpp"
#include "mvfsad/geometry.hpp"
#include "mvfsad/gradcheck.hpp"
#include "mvfsad/losses.hpp"
#include "mvfsad/metrics.hpp"
#include "mvfsad/renderer.hpp"
#include "mvfsad/scoring.hpp"
#include "mvfsad/toy_data.hpp"
#include "mvfsad/trainer.hpp"

using namespace mvfsad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mvfsad_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Reduced model used by the wiring and reproducibility checks.
ModelConfig reduced_model() {
  ModelConfig c;
  c.encoder.image_size = 64;
  c.encoder.patch_size = 16;
  c.encoder.depth = 6;
  c.encoder.stages = {2, 4, 6};
  c.encoder.feature_dim = 32;
  c.encoder.joint_dim = 32;
  return c;
}

void write_toy(const fs::path& root, const ToyConfig& cfg) {
  const ToyDataset ds = make_toy_dataset(cfg);
  for (const auto& s : ds.train) write_sample(root.string(), "toy", "train", "good", s.id, s.image, s.cloud, {});
  for (const auto& s : ds.test) {
    write_sample(root.string(), "toy", "test", s.label ? "blend" : "good", s.id, s.image, s.cloud,
                 s.label ? std::optional<Mask>(s.mask) : std::nullopt);
  }
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  if (out_text) *out_text = out.str();
  if (code != kExitOk) std::cerr << err.str();
  return code;
}

// 1. Geometry.
void geometry(Outcome& o) {
  const Timer t;
  Rng r(101);
  double worst_orth = 0.0;
  double worst_det = 0.0;
  for (int k = 0; k < 100; ++k) {
    const RotationAngles a{r.uniform(-M_PI, M_PI), r.uniform(-M_PI, M_PI), r.uniform(-M_PI, M_PI)};
    const Eigen::Matrix3d m = rotation_matrix(a).m;
    worst_orth = std::max(worst_orth, (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    worst_det = std::max(worst_det, std::abs(m.determinant() - 1.0));
  }
  o.require(worst_orth <= 1e-9 && worst_det <= 1e-9, "orthogonality");

  const int size = 96;
  const ToySample s = make_toy_object(size, 7);
  CameraModel cam;
  cam.fx = cam.fy = size;
  cam.cx = cam.cy = (size - 1) / 2.0;
  const RenderedView v = render_view(s.cloud, s.image, Rot3::identity(), cam, {size, size, {0.0, 0.0, 0.0}});
  std::size_t covered = 0;
  std::size_t mismatched = 0;
  for (int row = 0; row < size; ++row) {
    for (int col = 0; col < size; ++col) {
      if (!v.coverage(row, col)) continue;
      ++covered;
      if (v.image.pixel(row, col) != s.image.pixel(row, col)) ++mismatched;
    }
  }
  o.require(covered > 0 && mismatched == 0, "identity render");

  double worst_homog = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector3d p(r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(0.1, 3));
    const double lambda = r.uniform(0.01, 100);
    const Projection a = project_camera_point(p, cam);
    const Projection b = project_camera_point(lambda * p, cam);
    worst_homog = std::max({worst_homog, std::abs(a.u - b.u), std::abs(a.v - b.v)});
  }
  o.require(worst_homog <= 1e-9, "homogeneity");
  const double secs = t.seconds();
  o.require(secs < 5.0, "runtime");
  o.detail << "max |RtR-I| " << fmt(worst_orth) << ", max |det-1| " << fmt(worst_det) << ", " << covered
           << " covered pixels, " << mismatched << " mismatched, homogeneity " << fmt(worst_homog) << ", "
           << fmt(secs, 3) << " s";
}

// 2. Renderer determinism and point-order invariance.
void renderer(Outcome& o) {
  const Timer t;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    const int h = 25;
    const int w = 40;  // 1000 points
    PointCloudGrid cloud(h, w);
    Image tex(h, w);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      cloud.points[i] = {r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(2, 4)};
      cloud.valid[i] = 1;
    }
    for (double& x : tex.data) x = r.uniform();
    const Rot3 rot = rotation_matrix({r.uniform(-0.5, 0.5), r.uniform(-0.5, 0.5), r.uniform(-0.5, 0.5)});
    CameraModel cam;
    cam.fx = cam.fy = 40;
    cam.cx = cam.cy = 31.5;
    cam.extrinsic.translation = {0, 0, 0.5};
    const RenderSettings settings{64, 64, {0.2, 0.2, 0.2}};
    const RenderedView a = render_view(cloud, tex, rot, cam, settings);
    const RenderedView b = render_view(cloud, tex, rot, cam, settings);

    std::vector<std::size_t> perm(cloud.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[r.index(i)]);
    PointCloudGrid shuffled(h, w);
    Image shuffled_tex(h, w);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      shuffled.points[i] = cloud.points[perm[i]];
      shuffled.valid[i] = cloud.valid[perm[i]];
      const auto src = tex.pixel(static_cast<int>(perm[i]) / w, static_cast<int>(perm[i]) % w);
      shuffled_tex.set_pixel(static_cast<int>(i) / w, static_cast<int>(i) % w, src);
    }
    const RenderedView c = render_view(shuffled, shuffled_tex, rot, cam, settings);
    if (!(a == b) || !(a == c)) ++failures;
  }
  o.require(failures == 0, "bit-exact renders");
  const double secs = t.seconds();
  o.require(secs < 10.0, "runtime");
  o.detail << "20 scenes of 1000 points, " << failures << " mismatches, " << fmt(secs, 3) << " s";
}

// 3. Anomaly synthesis contracts.
void synthesis(Outcome& o) {
  const Timer t;
  int violations = 0;
  int empty = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const ToySample s = make_toy_object(96, 500 + k);
    const ScalarMap depth = depth_from_cloud(s.cloud);
    const Mask fg = foreground_mask(depth);
    Rng r(k);
    const PerlinParams p = draw_perlin_params(r);
    const Image source = procedural_noise_texture(96, 96, k + 9000);
    const AnomalySample a = synthesize_anomaly(s.image, depth, source, p, k);
    const AnomalySample b = synthesize_anomaly(s.image, depth, source, p, k);
    if (a.empty_mask) ++empty;
    bool ok = a.x_minus == b.x_minus && a.mask == b.mask && a.beta == b.beta;
    for (int row = 0; row < 96 && ok; ++row) {
      for (int col = 0; col < 96; ++col) {
        if (a.mask(row, col) && !fg(row, col)) ok = false;
        if (!a.mask(row, col) && a.x_minus.pixel(row, col) != s.image.pixel(row, col)) ok = false;
      }
    }
    if (!ok) ++violations;
  }
  o.require(violations == 0, "contracts");
  const double secs = t.seconds();
  o.require(secs < 10.0, "runtime");
  o.detail << "50 samples, " << violations << " violations, " << empty << " empty masks, " << fmt(secs, 3) << " s";
}

// 4. Gradient checks.
void gradients(Outcome& o) {
  const Timer t;
  double worst = 0.0;
  int checked = 0;
  for (const auto& c : gradcheck_components()) {
    const GradCheckResult r = grad_check(c);
    if (!r.has_parameters) continue;
    ++checked;
    worst = std::max(worst, r.max_rel_error);
    o.detail << c << " " << fmt(r.max_rel_error, 3) << ", ";
    o.require(r.max_rel_error <= 1e-4, c);
  }
  o.require(checked == 6, "component count");
  const double secs = t.seconds();
  o.require(secs < 60.0, "runtime");
  o.detail << "worst " << fmt(worst, 3) << ", " << fmt(secs, 3) << " s";
}

// 5. Loss analytics.
void losses(Outcome& o) {
  Matrix e(1, 4);
  e << 0.4, -1.0, 2.5, 0.3;
  const Tensor te = Tensor::constant(e);
  const double identical = contrastive_losses(te, te, te, te).con.item();
  const double d1 = std::abs(identical - 2.0 * std::log(2.0));
  o.require(d1 <= 1e-9, "identical embeddings");

  const Tensor half = Tensor::constant(Matrix::Constant(8, 8, 0.5));
  Mask m(8, 8, 0);
  m(2, 3) = m(5, 5) = 1;
  const double d2 = std::abs(seg_loss(half, m).item() - std::log(2.0));
  o.require(d2 <= 1e-9, "uniform map");

  Matrix x(1, 3);
  x << 1, 0, 0;
  Matrix y(1, 3);
  y << 0, 1, 0;
  const double aligned =
      contrastive_losses(Tensor::constant(x), Tensor::constant(y), Tensor::constant(x), Tensor::constant(y)).con.item();
  const double analytic = 2.0 * -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0));
  const double d3 = std::abs(aligned - analytic);
  o.require(d3 <= 1e-12 && std::abs(aligned - 0.6266) <= 1e-4, "aligned/orthogonal");
  o.detail << "l_con(identical) " << fmt(identical, 12) << ", l_seg(0.5) " << fmt(seg_loss(half, m).item(), 12)
           << ", l_con(aligned) " << fmt(aligned, 8);
}

// 6. Metric oracles.
void metrics(Outcome& o) {
  Rng r(606);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (int i = 0; i < 200; ++i) {
      const std::uint8_t label = r.uniform() < 0.4 ? 1 : 0;
      y.push_back(label);
      s.push_back(std::round((r.uniform() + 0.4 * label) * 50.0) / 50.0);
    }
    y[0] = 1;
    y[1] = 0;
    worst = std::max(worst, std::abs(auroc(s, y) - oracle::auroc(s, y)));
    worst = std::max(worst, std::abs(aupr(s, y) - oracle::aupr(s, y)));

    std::vector<ScalarMap> maps;
    std::vector<Mask> masks;
    std::vector<double> pooled;
    std::vector<std::uint8_t> pooled_y;
    for (int i = 0; i < 2; ++i) {
      Mask mk(10, 10, 0);
      ScalarMap mp(10, 10);
      for (std::size_t p = 0; p < mk.size(); ++p) {
        mk.values[p] = r.uniform() < 0.2 ? 1 : 0;
        mp.values[p] = std::round((r.uniform() + 0.5 * mk.values[p]) * 20.0) / 20.0;
      }
      mk.values[0] = 1;
      mk.values[1] = 0;
      pooled.insert(pooled.end(), mp.values.begin(), mp.values.end());
      pooled_y.insert(pooled_y.end(), mk.values.begin(), mk.values.end());
      maps.push_back(mp);
      masks.push_back(mk);
    }
    worst = std::max(worst, std::abs(p_auroc(maps, masks) - oracle::auroc(pooled, pooled_y)));
  }
  o.require(worst <= 1e-9, "oracle agreement");

  Mask m4(4, 4, 0);
  m4(1, 1) = m4(1, 2) = m4(2, 1) = m4(2, 2) = 1;
  const double zero4 = aupro(std::vector<ScalarMap>{ScalarMap(4, 4, 0.0)}, std::vector<Mask>{m4});
  o.require(zero4 == 0.0, "4x4 zero map");

  Mask m8(8, 8, 0);
  ScalarMap half(8, 8, 0.0);
  for (int row = 1; row <= 2; ++row) {
    for (int col = 1; col <= 2; ++col) {
      m8(row, col) = 1;
      half(row, col) = 1.0;
      m8(row + 4, col + 4) = 1;
    }
  }
  const double two_region = aupro(std::vector<ScalarMap>{half}, std::vector<Mask>{m8});
  o.require(two_region == 0.5, "8x8 two regions");

  ScalarMap exact(8, 8);
  for (std::size_t p = 0; p < m8.size(); ++p) exact.values[p] = m8.values[p];
  const double perfect = aupro(std::vector<ScalarMap>{exact}, std::vector<Mask>{m8});
  o.require(perfect == 1.0, "prediction equals mask");
  o.detail << "max oracle gap " << fmt(worst, 3) << ", aupro 4x4 zero " << zero4 << ", 8x8 two-region " << two_region
           << ", exact " << perfect;
}

// 7. Scoring identities.
void scoring(Outcome& o) {
  Rng r(707);
  double worst_sum = 0.0;
  double worst_a = 0.0;
  for (int k = 0; k < 100; ++k) {
    Matrix img(1, 64);
    Matrix tp(1, 64);
    Matrix tm(1, 64);
    for (Eigen::Index i = 0; i < 64; ++i) {
      img(0, i) = r.normal();
      tp(0, i) = r.normal();
      tm(0, i) = r.normal();
    }
    ScalarMap map(6, 6);
    for (double& v : map.values) v = r.uniform();
    const ScorePair s = classification_score(img, tp, tm, map);
    worst_sum = std::max(worst_sum, std::abs(s.s_plus + s.s_minus - 1.0));
    worst_a = std::max(worst_a, std::abs(s.a_score - (s.s_minus + *std::max_element(map.values.begin(), map.values.end()))));
  }
  o.require(worst_sum <= 1e-9 && worst_a <= 1e-9, "identities");

  Matrix img = Matrix::Zero(1, 2);
  img(0, 0) = 1.0;
  Matrix tp(1, 2);
  tp << 0.5, std::sqrt(1.0 - 0.25);
  Matrix tm(1, 2);
  tm << 0.57, -std::sqrt(1.0 - 0.57 * 0.57);
  const double s_minus = classification_score(img, tp, tm, ScalarMap(1, 1, 0.0), 0.07).s_minus;
  o.require(std::abs(s_minus - 0.7311) <= 1e-4, "worked example");
  o.detail << "max |S+ + S- - 1| " << fmt(worst_sum, 3) << ", max A_score gap " << fmt(worst_a, 3)
           << ", S- at gap 0.07: " << fmt(s_minus, 6);
}

// 8. End-to-end toy overfit at the default configuration.
constexpr double kToyImageAurocFloor = 0.95;
constexpr double kToyPixelAurocFloor = 0.90;

void toy_end_to_end(Outcome& o) {
  const Timer t;
  const ToyConfig toy;
  const ToyDataset ds = make_toy_dataset(toy);
  const ModelConfig mc;
  TrainConfig tc;
  tc.shots = toy.train_shots;
  const FrozenBackbone backbone(mc);
  TrainableHead head(mc, head_seed(tc), true);
  Trainer trainer(backbone, head, tc);
  std::vector<TrainingShot> shots;
  for (const auto& s : ds.train) shots.push_back({s.image, s.cloud});
  const auto records = trainer.fit(shots);
  const double train_secs = t.seconds();

  std::vector<EvalInput> inputs;
  for (const auto& s : ds.test) inputs.push_back({s.id, s.image, s.cloud, s.mask, s.label});
  const EvalReport report = evaluate(backbone, head, inputs);
  const double secs = t.seconds();
  const double i_auroc = report.i_auroc.value_or(0.0);
  const double p_auroc_v = report.p_auroc.value_or(0.0);
  o.require(inputs.size() == 40, "40 test samples");
  o.require(i_auroc >= kToyImageAurocFloor, "I-AUROC");
  o.require(p_auroc_v >= kToyPixelAurocFloor, "P-AUROC");
  o.require(secs < 600.0, "runtime");
  o.detail << "I-AUROC " << fmt(i_auroc) << ", P-AUROC " << fmt(p_auroc_v) << ", AUPRO "
           << fmt(report.aupro.value_or(0.0)) << ", final l_tot " << fmt(records.back().loss.l_tot) << ", train "
           << fmt(train_secs, 3) << " s, total " << fmt(secs, 3) << " s";
}

// 9. --no-multiview versus fusion structurally absent.
void ablation_wiring(Outcome& o) {
  const fs::path dir = scratch("ablation");
  ToyConfig toy;
  toy.size = 96;
  toy.test_normal = 4;
  toy.test_anomalous = 4;
  toy.min_mask_area = 40;
  write_toy(dir / "data", toy);
  RunConfig rc;
  rc.model = reduced_model();
  rc.train.epochs = 3;
  rc.train.seed = 19;
  const std::string config = (dir / "config.json").string();
  save_run_config(config, rc);
  const std::string ckpt = (dir / "nomv.ckpt").string();
  const std::string report_path = (dir / "nomv.json").string();
  const std::string data = (dir / "data").string();
  o.require(cli({"train", "--config", config, "--data-root", data, "--class", "toy", "--no-multiview", "--quiet",
                 "--out", ckpt}) == kExitOk,
            "cli train");
  o.require(cli({"eval", "--checkpoint", ckpt, "--data-root", data, "--class", "toy", "--report", report_path}) ==
                kExitOk,
            "cli eval");
  if (!o.pass) return;
  const Checkpoint ck = load_checkpoint(ckpt);
  o.require(ck.has_fusion && !ck.config.model.use_multiview, "fusion built but inactive");

  // Same run with the fusion modules never constructed.
  // Start from the stored config so CLI-derived fields (class name, prompts) match.
  const RunConfig absent_rc = ck.config;
  const FrozenBackbone backbone(absent_rc.model);
  TrainableHead absent(absent_rc.model, head_seed(absent_rc.train), false);
  Trainer trainer(backbone, absent, absent_rc.train);
  std::vector<TrainingShot> shots;
  const auto listed = list_samples(data, "toy", "train");
  for (int k = 0; k < absent_rc.train.shots; ++k) {
    LoadedSample ls = load_sample(listed[k], absent_rc.model.encoder.image_size);
    shots.push_back({std::move(ls.image), std::move(ls.cloud)});
  }
  trainer.fit(shots);
  std::vector<EvalInput> inputs;
  for (const auto& s : list_samples(data, "toy", "test")) {
    LoadedSample ls = load_sample(s, absent_rc.model.encoder.image_size);
    inputs.push_back({s.defect + "/" + s.name, std::move(ls.image), std::move(ls.cloud), ls.mask, s.label()});
  }
  EvalReport absent_report = evaluate(backbone, absent, inputs);
  absent_report.config = to_json(ck.config);
  std::ostringstream absent_json;
  absent_json << report_to_json(absent_report).dump(2) << "\n";
  const bool reports_equal = absent_json.str() == slurp(report_path);
  o.require(reports_equal, "EvalReport bytes");

  const TrainableHead inactive = head_from_checkpoint(ck);
  bool params_equal = true;
  for (const char* g : {"class_text_adapter", "seg_text_adapter", "image_adapter", "decoder"}) {
    params_equal = params_equal && checksum(inactive.group_parameters(g)) == checksum(absent.group_parameters(g));
  }
  o.require(params_equal, "shared parameters");
  o.detail << "report match " << (reports_equal ? "yes" : "no") << ", shared parameters match "
           << (params_equal ? "yes" : "no") << ", " << absent_report.samples.size() << " samples";
}

// 10. Reproducibility of two identical train runs.
void reproducibility(Outcome& o) {
  const fs::path dir = scratch("repro");
  ToyConfig toy;
  toy.size = 96;
  toy.test_normal = 4;
  toy.test_anomalous = 4;
  toy.min_mask_area = 40;
  write_toy(dir / "data", toy);
  RunConfig rc;
  rc.model = reduced_model();
  rc.train.epochs = 3;
  rc.train.seed = 23;
  const std::string config = (dir / "config.json").string();
  save_run_config(config, rc);
  const std::string data = (dir / "data").string();
  std::vector<std::string> reports;
  std::vector<std::string> checkpoints;
  for (const char* run : {"a", "b"}) {
    const std::string ckpt = (dir / (std::string(run) + ".ckpt")).string();
    const std::string report = (dir / (std::string(run) + ".json")).string();
    o.require(cli({"train", "--config", config, "--data-root", data, "--class", "toy", "--quiet", "--out", ckpt}) ==
                  kExitOk,
              "cli train");
    o.require(cli({"eval", "--checkpoint", ckpt, "--data-root", data, "--class", "toy", "--report", report}) ==
                  kExitOk,
              "cli eval");
    checkpoints.push_back(slurp(ckpt));
    reports.push_back(slurp(report));
  }
  const bool ck_equal = !checkpoints[0].empty() && checkpoints[0] == checkpoints[1];
  const bool rep_equal = !reports[0].empty() && reports[0] == reports[1];
  o.require(ck_equal, "checkpoint bytes");
  o.require(rep_equal, "report bytes");
  o.detail << "checkpoint " << checkpoints[0].size() << " bytes identical " << (ck_equal ? "yes" : "no")
           << ", report identical " << (rep_equal ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance checks");
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable; default: all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }
  const std::vector<std::function<void(Outcome&)>> checks{geometry, renderer,       synthesis,      gradients,
                                                          losses,   metrics,        scoring,        toy_end_to_end,
                                                          ablation_wiring, reproducibility};
  bool all = true;
  for (const int n : selected) {
    Outcome o;
    try {
      checks[static_cast<std::size_t>(n - 1)](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
