// celforge command-line front end: triplet mining, flow-based frame
// interpolation, line metrics, and codec/benchmark utilities.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "celforge/celforge.hpp"

namespace fs = std::filesystem;
using namespace celforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<fs::path> list_sorted(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext)
      out.push_back(entry.path());
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct CommonArgs {
  std::string config_path;
  int workers = 0;

  Config resolve() const {
    Config cfg;
    if (!config_path.empty()) cfg = read_config(config_path);
    if (workers > 0) cfg.workers = workers;
    return cfg;
  }
};

int run_rrld(const CommonArgs& common, const std::string& flow_prev,
             const std::string& flow_next, double min_norm_override) {
  Config cfg = common.resolve();
  if (min_norm_override >= 0.0) cfg.min_norm = min_norm_override;
  TripletFlows flows{read_flo(flow_prev), read_flo(flow_next)};
  const Parallel par(resolve_workers(cfg));
  const double value = rrld(flows, cfg.min_norm, par);
  std::printf("%.6f\n", value);
  return kExitOk;
}

int run_interp(const CommonArgs& common, const std::string& i0_path,
               const std::string& i1_path, const std::string& flow01_path,
               const std::string& flow10_path, double t, const std::string& out_path,
               const std::string& holes_path) {
  Config cfg = common.resolve();
  const ImageF32 i0 = read_png(i0_path);
  const ImageF32 i1 = read_png(i1_path);
  const FlowField flow01 = read_flo(flow01_path);
  const FlowField flow10 = read_flo(flow10_path);
  const auto flow_shape = [](const FlowField& f) {
    return std::to_string(f.height()) + "x" + std::to_string(f.width());
  };
  if (!i0.same_shape(i1))
    throw InvalidInput("interp: image shapes differ: " + i0.shape_string() + " vs " +
                       i1.shape_string());
  if (!i0.same_extent(flow01.height(), flow01.width()) ||
      !i0.same_extent(flow10.height(), flow10.width()))
    throw InvalidInput("interp: image " + i0.shape_string() + " vs flows " +
                       flow_shape(flow01) + " / " + flow_shape(flow10));
  const Parallel par(resolve_workers(cfg));
  const InfillResult res = halfway_interp(i0, i1, flow01, flow10, t, cfg.open_kernel, par);
  write_png(res.values, out_path);
  if (!holes_path.empty()) {
    ImageF32 holes(res.holes.height, res.holes.width, 1);
    for (std::size_t i = 0; i < holes.data.size(); ++i)
      holes.data[i] = res.holes.bits[i] ? 1.0f : 0.0f;
    write_png(holes, holes_path);
  }
  return kExitOk;
}

int run_edt(const CommonArgs& common, const std::string& input_path,
            const std::string& out_path, double tau_override) {
  Config cfg = common.resolve();
  if (tau_override > 0.0) cfg.nedt_tau = tau_override;
  const ImageF32 img = read_png(input_path);
  const Parallel par(resolve_workers(cfg));
  const DistanceField field = nedt(img, cfg.nedt_tau, cfg.dog, par);
  ImageF32 gray(field.height, field.width, 1);
  std::copy(field.values.begin(), field.values.end(), gray.data.begin());
  write_png(gray, out_path);
  return kExitOk;
}

int run_mine(const CommonArgs& common, const std::string& frames_dir,
             const std::string& flows_dir, const std::string& cuts_path,
             double rrld_threshold, double min_norm, long long seed,
             const std::string& dedup_model_path, const std::string& out_path) {
  Config cfg = common.resolve();
  if (rrld_threshold >= 0.0) cfg.rrld_threshold = rrld_threshold;
  if (min_norm >= 0.0) cfg.min_norm = min_norm;
  if (seed >= 0) cfg.seed = static_cast<std::uint32_t>(seed);

  const std::vector<fs::path> frames = list_sorted(frames_dir, ".png");
  const std::vector<Cut> cuts = read_cut_list(cuts_path);
  MineOptions opts = cfg.mine_options();
  if (!dedup_model_path.empty()) opts.dedup = read_dedup_model(dedup_model_path);

  const Parallel par(resolve_workers(cfg));
  const auto records =
      mine(frames, flows_dir, cuts, [](const fs::path& p) { return read_png(p); }, opts, par);
  write_manifest(records, out_path);

  std::size_t accepted = 0;
  for (const auto& r : records) accepted += r.accepted ? 1 : 0;
  std::fprintf(stderr, "mine: %zu records, %zu accepted, manifest written to %s\n",
               records.size(), accepted, out_path.c_str());
  return kExitOk;
}

int run_dedup_fit(const std::string& pairs_path, const std::string& out_path) {
  std::ifstream in(pairs_path);
  if (!in) throw IoError("dedup fit: cannot open " + pairs_path);
  std::vector<std::pair<DedupFeatures, bool>> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c2 == c1)
      throw FormatError("dedup fit: line " + std::to_string(lineno) +
                        ": expected 'pathA,pathB,label'");
    const std::string a = line.substr(0, c1);
    const std::string b = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string label = line.substr(c2 + 1);
    if (label != "0" && label != "1")
      throw FormatError("dedup fit: line " + std::to_string(lineno) + ": label must be 0 or 1");
    samples.emplace_back(dedup_features(read_png(a), read_png(b)), label == "1");
  }
  const DedupModel model = fit_dedup(samples);
  write_dedup_model(model, out_path);
  std::size_t correct = 0;
  for (const auto& [f, dup] : samples) correct += model.is_duplicate(f) == dup ? 1 : 0;
  std::fprintf(stderr, "dedup fit: %zu pairs, training accuracy %.1f%%, model written to %s\n",
               samples.size(), 100.0 * correct / samples.size(), out_path.c_str());
  return kExitOk;
}

int run_dedup_apply(const std::string& model_path, const std::string& frames_dir,
                    const std::string& out_path) {
  const DedupModel model = read_dedup_model(model_path);
  const std::vector<fs::path> frames = list_sorted(frames_dir, ".png");
  if (frames.size() < 2) throw InvalidInput("dedup apply: need at least 2 frames");
  std::string out;
  ImageF32 prev = read_png(frames[0]);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    ImageF32 cur = read_png(frames[i]);
    const DedupFeatures f = dedup_features(prev, cur);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", model.score(f));
    out += frames[i - 1].filename().string() + "," + frames[i].filename().string() + "," +
           buf + "," + (model.is_duplicate(f) ? "duplicate" : "distinct") + "\n";
    prev = std::move(cur);
  }
  if (out_path.empty()) {
    std::fputs(out.c_str(), stdout);
  } else {
    std::ofstream os(out_path, std::ios::trunc | std::ios::binary);
    if (!os) throw IoError("dedup apply: cannot open " + out_path);
    os << out;
  }
  return kExitOk;
}

int run_eval(const CommonArgs& common, const std::string& pred_dir,
             const std::string& gt_dir, const std::string& tags_path,
             const std::string& out_path, const std::string& crop_spec) {
  Config cfg = common.resolve();
  const std::vector<fs::path> preds = list_sorted(pred_dir, ".png");
  if (preds.empty()) throw InvalidInput("eval: no .png files in " + pred_dir);

  int crop_rect[4] = {0, 0, 0, 0};
  bool do_crop = false;
  if (!crop_spec.empty()) {
    if (std::sscanf(crop_spec.c_str(), "%d,%d,%d,%d", &crop_rect[0], &crop_rect[1],
                    &crop_rect[2], &crop_rect[3]) != 4)
      throw InvalidInput("eval: --crop must look like y,x,height,width");
    do_crop = true;
  }

  std::map<std::string, std::vector<std::string>> tag_map;
  if (!tags_path.empty()) {
    std::ifstream in(tags_path);
    if (!in) throw IoError("eval: cannot open tags file " + tags_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw FormatError("eval: tags line " + std::to_string(lineno) +
                          ": expected 'sample_id,tag'");
      tag_map[line.substr(0, comma)].push_back(line.substr(comma + 1));
    }
  }

  const Parallel par(resolve_workers(cfg));
  std::vector<MetricRow> rows(preds.size());
  std::vector<std::string> errors(preds.size());
  par.for_range(static_cast<std::int64_t>(preds.size()), [&](std::int64_t i) {
    const fs::path& pred_path = preds[i];
    const fs::path gt_path = fs::path(gt_dir) / pred_path.filename();
    MetricRow& row = rows[i];
    row.sample_id = pred_path.stem().string();
    if (auto it = tag_map.find(row.sample_id); it != tag_map.end()) row.tags = it->second;
    try {
      ImageF32 pred = read_png(pred_path);
      ImageF32 gt = read_png(gt_path);
      if (do_crop) {
        pred = crop(pred, crop_rect[0], crop_rect[1], crop_rect[2], crop_rect[3]);
        gt = crop(gt, crop_rect[0], crop_rect[1], crop_rect[2], crop_rect[3]);
      }
      row.psnr = psnr(pred, gt);
      row.ssim = ssim(pred, gt);
      try {
        row.cd = chamfer_eval(pred, gt, cfg.dog, ChamferOptions{cfg.chamfer_diameter});
      } catch (const EmptySketchError&) {
        row.cd = std::nullopt;  // blank sketch: flagged, excluded from means
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw IoError("eval: sample " + preds[i].filename().string() + ": " + errors[i]);

  const MetricReport report = aggregate(std::move(rows));
  write_report(report, out_path);
  std::fputs(format_report_table(report).c_str(), stdout);
  return kExitOk;
}

// Reference EDT used only to demonstrate the speedup of the production
// transform; quadratic nearest-line-pixel search.
std::vector<std::int64_t> edt_squared_reference(const BinarySketch& sketch) {
  std::vector<std::pair<int, int>> line_pixels;
  for (int y = 0; y < sketch.height; ++y)
    for (int x = 0; x < sketch.width; ++x)
      if (sketch.at(y, x)) line_pixels.emplace_back(y, x);
  std::vector<std::int64_t> out(sketch.bits.size(), kEdtInf);
  if (line_pixels.empty()) return out;
  for (int y = 0; y < sketch.height; ++y)
    for (int x = 0; x < sketch.width; ++x) {
      std::int64_t best = kEdtInf;
      for (const auto& [ly, lx] : line_pixels) {
        const std::int64_t dy = y - ly, dx = x - lx;
        best = std::min(best, dy * dy + dx * dx);
      }
      out[static_cast<std::size_t>(y) * sketch.width + x] = best;
    }
  return out;
}

ImageF32 bench_line_art(std::mt19937& gen, int h, int w) {
  ImageF32 img = ImageF32::constant(h, w, 3, 1.0f);
  std::uniform_int_distribution<int> ry(2, h - 3), rx(2, w - 3), len(10, w / 3);
  for (int stroke = 0; stroke < 60; ++stroke) {
    const int y = ry(gen), x = rx(gen), n = len(gen);
    const bool horizontal = stroke % 2 == 0;
    for (int i = 0; i < n; ++i) {
      const int yy = horizontal ? y : std::min(h - 1, y + i);
      const int xx = horizontal ? std::min(w - 1, x + i) : x;
      for (int c = 0; c < 3; ++c) img.at(yy, xx, c) = 0.0f;
    }
  }
  return img;
}

int run_bench(const CommonArgs& common, const std::string& op, const std::string& size_str,
              int iters, double density) {
  Config cfg = common.resolve();
  const auto xpos = size_str.find('x');
  if (xpos == std::string::npos)
    throw InvalidInput("bench: --size must look like 540x960");
  const int h = std::stoi(size_str.substr(0, xpos));
  const int w = std::stoi(size_str.substr(xpos + 1));
  if (h < 1 || w < 1) throw InvalidInput("bench: bad size");
  const double px = static_cast<double>(h) * w;
  const Parallel par(resolve_workers(cfg));

  std::mt19937 gen(12345);
  BinarySketch sketch(h, w);
  std::uniform_real_distribution<double> d01(0.0, 1.0);
  for (auto& b : sketch.bits) b = d01(gen) < density ? 1 : 0;
  if (sketch.empty_mask()) sketch.at(h / 2, w / 2) = 1;

  const auto report_iters = [&](const std::function<void()>& body) {
    double best = 1e300;
    for (int i = 0; i < iters; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      body();
      const double ms = elapsed_ms(t0);
      best = std::min(best, ms);
      std::printf("iter %2d: %9.3f ms  (%.1f Mpx/s)\n", i, ms, px / ms / 1000.0);
    }
    return best;
  };

  if (op == "edt") {
    const double best = report_iters([&] { edt_squared(sketch, par); });
    std::printf("best: %.3f ms\n", best);
  } else if (op == "edt_brute") {
    const double best = report_iters([&] { edt_squared_reference(sketch); });
    std::printf("best: %.3f ms\n", best);
  } else if (op == "edt_compare") {
    double fast = 1e300, brute = 1e300;
    std::vector<std::int64_t> a, b;
    for (int i = 0; i < iters; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      a = edt_squared(sketch, par);
      fast = std::min(fast, elapsed_ms(t0));
      t0 = std::chrono::steady_clock::now();
      b = edt_squared_reference(sketch);
      brute = std::min(brute, elapsed_ms(t0));
    }
    std::printf("production: %.3f ms, reference: %.3f ms, speedup: %.1fx, match: %s\n", fast,
                brute, brute / fast, a == b ? "yes" : "NO");
  } else if (op == "splat") {
    ImageF32 img(h, w, 3);
    for (auto& v : img.data) v = static_cast<float>(d01(gen));
    FlowField flow(h, w);
    std::uniform_real_distribution<float> fd(-8.0f, 8.0f);
    for (auto& v : flow.img.data) v = fd(gen);
    ImageF32 z(h, w, 1);
    std::uniform_real_distribution<float> zd(-2.0f, 0.0f);
    for (auto& v : z.data) v = zd(gen);
    const double best = report_iters([&] { softmax_splat(img, flow, z, par); });
    std::printf("best: %.3f ms\n", best);
  } else if (op == "metric_pass") {
    const ImageF32 img0 = bench_line_art(gen, h, w);
    const ImageF32 img1 = bench_line_art(gen, h, w);
    const double diameter = std::sqrt(static_cast<double>(h) * h + static_cast<double>(w) * w);
    const double best = report_iters([&] {
      const BinarySketch s0 = extract_sketch(img0, cfg.dog, par);
      const BinarySketch s1 = extract_sketch(img1, cfg.dog, par);
      const DistanceField d0 = edt(s0, par);
      const DistanceField d1 = edt(s1, par);
      const double scale = cfg.nedt_tau * h;
      volatile double sink = 0.0;
      for (float v : d0.values)
        sink = sink + (std::isinf(v) ? 1.0 : 1.0 - std::exp(-v / scale));
      double sum = 0.0;
      for (std::size_t i = 0; i < s0.bits.size(); ++i) {
        if (s0.bits[i]) sum += d1.values[i];
        if (s1.bits[i]) sum += d0.values[i];
      }
      sink = sink + sum / (2.0 * h * w * diameter);
    });
    std::printf("best: %.3f ms (full pass: 2x sketch + 2x EDT + NEDT + chamfer)\n", best);
  } else {
    throw InvalidInput("bench: unknown op '" + op +
                       "' (try edt, edt_brute, edt_compare, splat, metric_pass)");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"line-based metrics, flow warping, and triplet mining for 2D animation"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--config", common.config_path, "key = value configuration file");
  app.add_option("--workers", common.workers,
                 "worker threads (default: CELFORGE_WORKERS or logical cores)");

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "mine training triplets from a frame sequence");
  std::string frames_dir, flows_dir, cuts_path, dedup_model_path, mine_out;
  double mine_rrld = -1.0, mine_min_norm = -1.0;
  long long mine_seed = -1;
  mine_cmd->add_option("--frames", frames_dir, "directory of .png frames")->required();
  mine_cmd->add_option("--flows", flows_dir, "directory of <mid>__<other>.flo files")->required();
  mine_cmd->add_option("--cuts", cuts_path, "cut list file (cut_id,start,end)")->required();
  mine_cmd->add_option("--rrld-threshold", mine_rrld, "acceptance cutoff (default 0.3)");
  mine_cmd->add_option("--min-norm", mine_min_norm, "omega flow-norm threshold (default 2.0)");
  mine_cmd->add_option("--seed", mine_seed, "selection seed");
  mine_cmd->add_option("--dedup-model", dedup_model_path, "duplicate-detector model file");
  mine_cmd->add_option("--out", mine_out, "output manifest path")->required();

  // rrld
  auto* rrld_cmd = app.add_subcommand("rrld", "print the linearity score of one flow pair");
  std::string flow_prev_path, flow_next_path;
  double rrld_min_norm = -1.0;
  rrld_cmd->add_option("--flow-prev", flow_prev_path, "mid-to-prev .flo")->required();
  rrld_cmd->add_option("--flow-next", flow_next_path, "mid-to-next .flo")->required();
  rrld_cmd->add_option("--min-norm", rrld_min_norm, "omega flow-norm threshold (default 2.0)");

  // dedup fit / apply
  auto* dedup_cmd = app.add_subcommand("dedup", "duplicate-frame detector");
  dedup_cmd->require_subcommand(1);
  auto* fit_cmd = dedup_cmd->add_subcommand("fit", "fit the linear scorer from labeled pairs");
  std::string pairs_path, fit_out;
  fit_cmd->add_option("--pairs", pairs_path, "file of pathA,pathB,label lines")->required();
  fit_cmd->add_option("--out", fit_out, "output model path")->required();
  auto* apply_cmd = dedup_cmd->add_subcommand("apply", "score consecutive frames in a directory");
  std::string apply_model, apply_frames, apply_out;
  apply_cmd->add_option("--model", apply_model, "model file")->required();
  apply_cmd->add_option("--frames", apply_frames, "directory of .png frames")->required();
  apply_cmd->add_option("--out", apply_out, "write results here instead of stdout");

  // interp
  auto* interp_cmd = app.add_subcommand("interp", "interpolate a frame between two inputs");
  std::string i0_path, i1_path, flow01_path, flow10_path, interp_out, holes_out;
  double t_value = 0.5;
  interp_cmd->add_option("--i0", i0_path, "earlier frame .png")->required();
  interp_cmd->add_option("--i1", i1_path, "later frame .png")->required();
  interp_cmd->add_option("--flow01", flow01_path, "flow i0 -> i1 (.flo)")->required();
  interp_cmd->add_option("--flow10", flow10_path, "flow i1 -> i0 (.flo)")->required();
  interp_cmd->add_option("--t", t_value, "interpolation time in [0,1] (default 0.5)");
  interp_cmd->add_option("--out", interp_out, "output .png")->required();
  interp_cmd->add_option("--holes", holes_out, "optional residual-hole mask .png");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
  std::string pred_dir, gt_dir, tags_path, eval_out, eval_crop;
  eval_cmd->add_option("--pred", pred_dir, "directory of predicted .png frames")->required();
  eval_cmd->add_option("--gt", gt_dir, "directory of ground-truth .png frames")->required();
  eval_cmd->add_option("--tags", tags_path, "optional sample_id,tag file");
  eval_cmd->add_option("--out", eval_out, "output report path (JSON lines)")->required();
  eval_cmd->add_option("--crop", eval_crop, "optional y,x,height,width region of interest");

  // edt
  auto* edt_cmd = app.add_subcommand("edt", "write the normalized distance transform as a PNG");
  std::string edt_in, edt_out;
  double edt_tau = -1.0;
  edt_cmd->add_option("--input", edt_in, "input .png")->required();
  edt_cmd->add_option("--out", edt_out, "output grayscale .png")->required();
  edt_cmd->add_option("--tau", edt_tau, "steepness (default 15/540)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "time one operation");
  std::string bench_op, bench_size = "540x960";
  int bench_iters = 10;
  double bench_density = 0.05;
  bench_cmd->add_option("--op", bench_op, "edt | edt_brute | edt_compare | splat | metric_pass")
      ->required();
  bench_cmd->add_option("--size", bench_size, "HxW (default 540x960)");
  bench_cmd->add_option("--iters", bench_iters, "iterations (default 10)");
  bench_cmd->add_option("--density", bench_density, "sketch line density (default 0.05)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (mine_cmd->parsed())
      return run_mine(common, frames_dir, flows_dir, cuts_path, mine_rrld, mine_min_norm,
                      mine_seed, dedup_model_path, mine_out);
    if (rrld_cmd->parsed())
      return run_rrld(common, flow_prev_path, flow_next_path, rrld_min_norm);
    if (dedup_cmd->parsed()) {
      if (fit_cmd->parsed()) return run_dedup_fit(pairs_path, fit_out);
      return run_dedup_apply(apply_model, apply_frames, apply_out);
    }
    if (interp_cmd->parsed())
      return run_interp(common, i0_path, i1_path, flow01_path, flow10_path, t_value,
                        interp_out, holes_out);
    if (eval_cmd->parsed())
      return run_eval(common, pred_dir, gt_dir, tags_path, eval_out, eval_crop);
    if (edt_cmd->parsed()) return run_edt(common, edt_in, edt_out, edt_tau);
    if (bench_cmd->parsed())
      return run_bench(common, bench_op, bench_size, bench_iters, bench_density);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "celforge: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
