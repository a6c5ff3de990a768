// Copyright 2026 The Mapforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mapforge/cli.hpp"

#include "mapforge/assign.hpp"
#include "mapforge/dfa_kernel.hpp"
#include "mapforge/io.hpp"
#include "mapforge/map_eval.hpp"
#include "mapforge/parallel.hpp"
#include "mapforge/ppdn.hpp"
#include "mapforge/raster.hpp"
#include "mapforge/rng.hpp"
#include "mapforge/simd/kernels.hpp"
#include "mapforge/synthetic.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

namespace mapforge::cli
{
namespace
{
using nlohmann::json;
namespace fs = std::filesystem;

struct GenNoiseOptions
{
  std::string input;
  std::string output;
  double rot_max_deg{15.0};
  ppdn::NoiseSpec spec;
};

struct RasterizeOptions
{
  std::string input;
  std::string range{"-15,15,-30,30"};
  std::string out_dir;
  raster::RasterSpec spec;
  bool no_fill{false};
};

struct EvalOptions
{
  std::string gt;
  std::string pred;
  std::string thresholds{"0.5,1.0,1.5"};
  std::size_t points{100};
  std::string classes{"ped_crossing,divider,boundary"};
  std::string report;
};

struct MatchOptions
{
  std::string gt;
  std::string pred;
  double w_cls{1.0};
  double w_pts{1.0};
  std::size_t points{20};
  std::string out;
};

struct BenchOptions
{
  std::string suite{"raster"};
  std::size_t size{20};
  std::uint64_t seed{0};
};

struct ProjectOptions
{
  std::string input;
  std::string out;
  std::size_t points{8};
  std::size_t channels{8};
  std::size_t cams{6};
  std::uint64_t seed{0};
};

// Pairs ground-truth frames with prediction frames by (scene_id, frame_id).
std::vector<std::pair<const io::SceneRecord *, const io::SceneRecord *>> pair_frames(
  const std::vector<io::SceneRecord> & gts, const std::vector<io::SceneRecord> & preds)
{
  std::map<std::string, const io::SceneRecord *> by_key;
  for (const auto & p : preds) {
    if (!by_key.emplace(p.key(), &p).second) {
      throw io::IoError("duplicate prediction frame " + p.key());
    }
  }
  std::vector<std::pair<const io::SceneRecord *, const io::SceneRecord *>> out;
  std::vector<std::string> missing_pred;
  std::map<std::string, bool> seen_gt;
  for (const auto & g : gts) {
    if (!seen_gt.emplace(g.key(), true).second) {
      throw io::IoError("duplicate ground-truth frame " + g.key());
    }
    const auto it = by_key.find(g.key());
    if (it == by_key.end()) {
      missing_pred.push_back(g.key());
      continue;
    }
    out.emplace_back(&g, it->second);
  }
  std::vector<std::string> missing_gt;
  for (const auto & [key, rec] : by_key) {
    if (!seen_gt.count(key)) {
      missing_gt.push_back(key);
    }
  }
  if (!missing_pred.empty() || !missing_gt.empty()) {
    std::ostringstream msg;
    msg << "frame keys differ between ground truth and predictions";
    if (!missing_pred.empty()) {
      msg << "; missing predictions for:";
      for (const auto & k : missing_pred) {
        msg << ' ' << k;
      }
    }
    if (!missing_gt.empty()) {
      msg << "; missing ground truth for:";
      for (const auto & k : missing_gt) {
        msg << ' ' << k;
      }
    }
    throw io::IoError(msg.str());
  }
  return out;
}

std::vector<eval::Prediction> eval_predictions(const io::SceneRecord & rec)
{
  std::vector<eval::Prediction> out;
  if (rec.predictions) {
    for (const auto & p : *rec.predictions) {
      out.push_back({p.element, p.confidence});
    }
  }
  return out;
}

int cmd_gen_noise(const GenNoiseOptions & opt, std::ostream & out)
{
  ppdn::NoiseSpec spec = opt.spec;
  spec.rot_max = opt.rot_max_deg * std::numbers::pi / 180.0;
  spec.validate();
  const auto frames = io::read_scenes(opt.input);
  std::vector<json> lines(frames.size());
  parallel_for(frames.size(), thread_count_from_env(), [&](std::size_t f) {
    const auto groups = ppdn::generate_denoise_groups(frames[f].elements, spec, 1);
    lines[f] = io::denoise_groups_to_json(frames[f], groups);
  });
  io::write_jsonl(opt.output, lines);
  out << "wrote " << lines.size() << " frames to " << opt.output << '\n';
  return 0;
}

int cmd_rasterize(const RasterizeOptions & opt, std::ostream & out)
{
  raster::RasterSpec spec = opt.spec;
  spec.fill_polygons = !opt.no_fill;
  spec.validate();
  const PerceptionRange range = io::parse_range(opt.range);
  const auto frames = io::read_scenes(opt.input);
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec || !fs::is_directory(opt.out_dir)) {
    throw io::IoError("cannot create output directory " + opt.out_dir);
  }
  for (const auto & f : frames) {
    for (const auto * id : {&f.scene_id, &f.frame_id}) {
      if (id->find_first_of("/\\") != std::string::npos || *id == "." || *id == "..") {
        throw io::IoError("frame key " + f.key() + " cannot be used as a file name");
      }
    }
  }
  parallel_for(frames.size(), thread_count_from_env(), [&](std::size_t i) {
    const auto grid = raster::rasterize_elements(frames[i].elements, spec, range);
    io::write_mask(opt.out_dir, frames[i].scene_id + "_" + frames[i].frame_id, grid, spec);
  });
  const auto probe = raster::BevGrid::empty(range, spec.resolution);
  out << "wrote " << frames.size() << " masks of " << kNumClasses << "x" << probe.height << "x" << probe.width
      << " to " << opt.out_dir << '\n';
  return 0;
}

int cmd_eval(const EvalOptions & opt, std::ostream & out)
{
  eval::EvalSpec spec;
  spec.thresholds = io::parse_number_list(opt.thresholds);
  spec.n_points = opt.points;
  spec.classes = io::parse_class_list(opt.classes);
  spec.validate();
  const auto gts = io::read_scenes(opt.gt);
  const auto preds = io::read_scenes(opt.pred);
  const auto paired = pair_frames(gts, preds);
  std::vector<eval::EvalFrame> frames;
  frames.reserve(paired.size());
  for (const auto & [g, p] : paired) {
    frames.push_back({g->elements, eval_predictions(*p)});
  }
  const auto report = eval::evaluate(frames, spec);
  std::ofstream rep(opt.report, std::ios::binary | std::ios::trunc);
  if (!rep) {
    throw io::IoError("cannot write " + opt.report);
  }
  rep << io::report_to_json(report).dump(2) << '\n';
  for (const auto label : spec.classes) {
    out << "AP[" << to_string(label) << "]: " << eval::format_percent(report.per_class.at(label).class_ap) << '\n';
  }
  out << "mAP: " << eval::format_percent(report.map_ap) << '\n';
  return 0;
}

int cmd_match(const MatchOptions & opt, std::ostream & out)
{
  assign::CostSpec spec{opt.w_cls, opt.w_pts, opt.points};
  spec.validate();
  const auto gts = io::read_scenes(opt.gt);
  const auto preds = io::read_scenes(opt.pred);
  const auto paired = pair_frames(gts, preds);
  std::vector<json> lines(paired.size());
  parallel_for(paired.size(), thread_count_from_env(), [&](std::size_t i) {
    const auto & [g, p] = paired[i];
    std::vector<assign::ScoredElement> scored;
    if (p->predictions) {
      for (const auto & pe : *p->predictions) {
        scored.push_back({pe.element, pe.class_scores()});
      }
    }
    lines[i] = io::assignment_to_json(*g, assign::match_predictions(scored, g->elements, spec));
  });
  io::write_jsonl(opt.out, lines);
  out << "wrote " << lines.size() << " frames to " << opt.out << '\n';
  return 0;
}

std::vector<dfa::FeaturePyramid> synthetic_pyramids(
  std::size_t views, std::size_t width, std::size_t height, std::size_t channels, std::uint64_t seed)
{
  constexpr std::uint32_t kFeatureTag = 0x46454154u;  // "FEAT"
  const std::array<double, 3> strides = {8.0, 16.0, 32.0};
  std::vector<dfa::FeaturePyramid> pyramids(views);
  for (std::size_t v = 0; v < views; ++v) {
    for (std::size_t l = 0; l < strides.size(); ++l) {
      const auto h = static_cast<std::size_t>(static_cast<double>(height) / strides[l]);
      const auto w = static_cast<std::size_t>(static_cast<double>(width) / strides[l]);
      dfa::FeatureGrid grid(h, w, channels);
      CounterStream rng(seed, static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(l), kFeatureTag);
      for (auto & value : grid.values) {
        value = rng.uniform(-1.0, 1.0);
      }
      pyramids[v].levels.push_back(std::move(grid));
      pyramids[v].strides.push_back(strides[l]);
    }
  }
  return pyramids;
}

dfa::SamplePointSet synthetic_sample_set(
  std::vector<dfa::Vec3> keypoints, std::size_t views, std::size_t levels, CounterStream & rng)
{
  dfa::SamplePointSet sp;
  sp.keypoints = std::move(keypoints);
  sp.num_views = views;
  sp.num_levels = levels;
  const std::size_t count = sp.keypoints.size() * views * levels;
  for (std::size_t i = 0; i < count; ++i) {
    sp.offsets.push_back({rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)});
    sp.weights.push_back(rng.uniform(0.05, 1.0));
  }
  return sp;
}

constexpr std::size_t kRigWidth = 800;
constexpr std::size_t kRigHeight = 448;
constexpr double kRigFocal = 400.0;

int cmd_project(const ProjectOptions & opt, std::ostream & out)
{
  constexpr std::uint32_t kClsTag = 0x434C534Fu;  // "CLSO"
  constexpr std::uint32_t kRegTag = 0x5245474Fu;  // "REGO"
  const auto frames = io::read_scenes(opt.input);
  const auto rig = dfa::make_surround_rig(opt.cams, kRigWidth, kRigHeight, kRigFocal);
  const auto pyramids = synthetic_pyramids(opt.cams, kRigWidth, kRigHeight, opt.channels, opt.seed);
  const std::size_t levels = pyramids.front().levels.size();
  std::vector<json> lines(frames.size());
  parallel_for(frames.size(), thread_count_from_env(), [&](std::size_t f) {
    json features = json::array();
    for (std::size_t i = 0; i < frames[f].elements.size(); ++i) {
      const auto kps = dfa::keypoints_from_element(frames[f].elements[i], opt.points);
      CounterStream cls_rng(opt.seed, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(i), kClsTag);
      CounterStream reg_rng(opt.seed, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(i), kRegTag);
      const auto cls_sp = synthetic_sample_set(kps, opt.cams, levels, cls_rng);
      const auto reg_sp = synthetic_sample_set(kps, opt.cams, levels, reg_rng);
      const auto res = dfa::decoupled_aggregate(pyramids, rig, cls_sp, reg_sp);
      std::size_t valid = 0;
      for (const auto v : res.cls.valid) {
        valid += v;
      }
      features.push_back(
        json{{"element_index", i}, {"cls", res.cls.values}, {"reg", res.reg.values}, {"valid_projections", valid}});
    }
    lines[f] = json{{"scene_id", frames[f].scene_id}, {"frame_id", frames[f].frame_id}, {"features", std::move(features)}};
  });
  io::write_jsonl(opt.out, lines);
  out << "wrote " << lines.size() << " frames to " << opt.out << '\n';
  return 0;
}

int cmd_bench(const BenchOptions & opt, std::ostream & out)
{
  using clock = std::chrono::steady_clock;
  const std::size_t threads = thread_count_from_env();
  out << "suite: " << opt.suite << '\n'
      << "simd: " << simd::isa_name(simd::kernels().isa) << '\n'
      << "threads: " << threads << " (hardware " << std::thread::hardware_concurrency() << ")\n";
  constexpr std::size_t kElementsPerFrame = 20;
  const auto frames = synthetic::make_frames(opt.size, kElementsPerFrame, opt.seed);
  std::size_t elements = 0;
  for (const auto & f : frames) {
    elements += f.elements.size();
  }
  double seconds = 0.0;
  if (opt.suite == "raster") {
    const raster::RasterSpec spec;
    std::vector<std::size_t> lit(frames.size(), 0);
    const auto t0 = clock::now();
    parallel_for(frames.size(), threads, [&](std::size_t i) {
      const auto grid = raster::rasterize_elements(frames[i].elements, spec, kBaseRange);
      for (const auto b : grid.data) {
        lit[i] += b != 0;
      }
    });
    seconds = std::chrono::duration<double>(clock::now() - t0).count();
    const auto probe = raster::BevGrid::empty(kBaseRange, spec.resolution);
    const double pixels = static_cast<double>(frames.size() * probe.data.size());
    std::size_t total_lit = 0;
    for (const auto v : lit) {
      total_lit += v;
    }
    out << "frames: " << frames.size() << "\nelements: " << elements << "\nforeground_pixels: " << total_lit
        << "\npixels_per_s: " << pixels / seconds << '\n';
  } else if (opt.suite == "eval") {
    ppdn::NoiseSpec noise;
    noise.seed = opt.seed;
    std::vector<eval::EvalFrame> eval_frames;
    for (const auto & f : frames) {
      eval::EvalFrame ef{f.elements, {}};
      const auto groups = ppdn::generate_denoise_groups(f.elements, noise);
      for (const auto & item : groups.front().items) {
        ef.preds.push_back({item.noised, 1.0 / (1.0 + std::abs(item.applied.dx) + std::abs(item.applied.dy))});
      }
      eval_frames.push_back(std::move(ef));
    }
    const auto t0 = clock::now();
    const auto report = eval::evaluate(eval_frames, eval::EvalSpec{});
    seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out << "frames: " << frames.size() << "\nelements: " << elements << "\nmap: " << eval::format_percent(report.map_ap)
        << '\n';
  } else if (opt.suite == "dfa") {
    const auto rig = dfa::make_surround_rig(6, kRigWidth, kRigHeight, kRigFocal);
    const auto pyramids = synthetic_pyramids(6, kRigWidth, kRigHeight, 32, opt.seed);
    const auto t0 = clock::now();
    std::vector<double> checksums(frames.size(), 0.0);
    parallel_for(frames.size(), threads, [&](std::size_t f) {
      for (std::size_t i = 0; i < frames[f].elements.size(); ++i) {
        CounterStream rng(opt.seed, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(i), 0x42454E43u);
        const auto kps = dfa::keypoints_from_element(frames[f].elements[i], 8);
        const auto cls_sp = synthetic_sample_set(kps, 6, 3, rng);
        const auto reg_sp = synthetic_sample_set(kps, 6, 3, rng);
        const auto res = dfa::decoupled_aggregate(pyramids, rig, cls_sp, reg_sp);
        checksums[f] += res.cls.values[0] + res.reg.values[0];
      }
    });
    seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out << "frames: " << frames.size() << "\nelements: " << elements << '\n';
  } else {
    throw io::IoError("unknown bench suite '" + opt.suite + "' (expected raster, eval or dfa)");
  }
  out << "seconds: " << seconds << "\nelements_per_s: " << static_cast<double>(elements) / seconds << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Vectorized HD-map toolkit: query noise, BEV masks, matching and Chamfer AP"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenNoiseOptions gen;
  auto * gen_cmd = app.add_subcommand("gen-noise", "Generate physical-prior denoise groups for every frame");
  gen_cmd->add_option("--input", gen.input, "Scene JSONL")->required();
  gen_cmd->add_option("--output", gen.output, "Output JSONL")->required();
  gen_cmd->add_option("--rot-max-deg", gen.rot_max_deg, "Max rotation noise in degrees")->capture_default_str();
  gen_cmd->add_option("--trans-max", gen.spec.trans_max, "Max location noise in meters")->capture_default_str();
  gen_cmd->add_option("--scale-min", gen.spec.scale_min)->capture_default_str();
  gen_cmd->add_option("--scale-max", gen.spec.scale_max)->capture_default_str();
  gen_cmd->add_option("--curv-min", gen.spec.curv_min)->capture_default_str();
  gen_cmd->add_option("--curv-max", gen.spec.curv_max)->capture_default_str();
  gen_cmd->add_option("--groups", gen.spec.groups, "Denoise groups per frame")->capture_default_str();
  gen_cmd->add_option("--seed", gen.spec.seed)->capture_default_str();

  RasterizeOptions ras;
  auto * ras_cmd = app.add_subcommand("rasterize", "Write per-class BEV foreground masks for every frame");
  ras_cmd->add_option("--input", ras.input, "Scene JSONL")->required();
  ras_cmd->add_option("--range", ras.range, "x_min,x_max,y_min,y_max in meters")->capture_default_str();
  ras_cmd->add_option("--resolution", ras.spec.resolution, "Meters per pixel")->capture_default_str();
  ras_cmd->add_option("--half-width", ras.spec.line_half_width, "Polyline half width in meters")->capture_default_str();
  ras_cmd->add_flag("--no-fill", ras.no_fill, "Draw polygon outlines instead of filling");
  ras_cmd->add_option("--out-dir", ras.out_dir)->required();

  EvalOptions ev;
  auto * ev_cmd = app.add_subcommand("eval", "Chamfer-distance AP evaluation");
  ev_cmd->add_option("--gt", ev.gt, "Ground-truth scene JSONL")->required();
  ev_cmd->add_option("--pred", ev.pred, "Prediction scene JSONL")->required();
  ev_cmd->add_option("--thresholds", ev.thresholds, "Chamfer thresholds in meters")->capture_default_str();
  ev_cmd->add_option("--points", ev.points, "Resampled points per element")->capture_default_str();
  ev_cmd->add_option("--classes", ev.classes)->capture_default_str();
  ev_cmd->add_option("--report", ev.report, "Report JSON")->required();

  MatchOptions mt;
  auto * mt_cmd = app.add_subcommand("match", "One-to-one assignment of predictions to ground truth");
  mt_cmd->add_option("--gt", mt.gt)->required();
  mt_cmd->add_option("--pred", mt.pred)->required();
  mt_cmd->add_option("--w-cls", mt.w_cls)->capture_default_str();
  mt_cmd->add_option("--w-pts", mt.w_pts)->capture_default_str();
  mt_cmd->add_option("--points", mt.points)->capture_default_str();
  mt_cmd->add_option("--out", mt.out)->required();

  BenchOptions bn;
  auto * bn_cmd = app.add_subcommand("bench", "Self-measured throughput on synthetic frames");
  bn_cmd->add_option("--suite", bn.suite, "raster, eval or dfa")->capture_default_str();
  bn_cmd->add_option("--size", bn.size, "Number of synthetic frames")->capture_default_str();
  bn_cmd->add_option("--seed", bn.seed)->capture_default_str();

  ProjectOptions pj;
  auto * pj_cmd = app.add_subcommand("project", "Decoupled feature aggregation on a synthetic camera rig");
  pj_cmd->add_option("--input", pj.input, "Scene JSONL")->required();
  pj_cmd->add_option("--out", pj.out)->required();
  pj_cmd->add_option("--points", pj.points)->capture_default_str();
  pj_cmd->add_option("--channels", pj.channels)->capture_default_str();
  pj_cmd->add_option("--cams", pj.cams)->capture_default_str();
  pj_cmd->add_option("--seed", pj.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen_cmd) {
      return cmd_gen_noise(gen, out);
    }
    if (*ras_cmd) {
      return cmd_rasterize(ras, out);
    }
    if (*ev_cmd) {
      return cmd_eval(ev, out);
    }
    if (*mt_cmd) {
      return cmd_match(mt, out);
    }
    if (*bn_cmd) {
      return cmd_bench(bn, out);
    }
    if (*pj_cmd) {
      if (pj.cams == 0 || pj.points < 2 || pj.channels == 0) {
        throw io::IoError("project needs --cams >= 1, --points >= 2 and --channels >= 1");
      }
      return cmd_project(pj, out);
    }
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace mapforge::cli
