#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include <json.hpp>

#include "commands.h"
#include "gvv/core/layout.h"
#include "gvv/core/packing.h"
#include "gvv/core/quantize.h"
#include "gvv/core/splat_io.h"
#include "gvv/error.h"
#include "gvv/motion/fit.h"
#include "gvv/motion/motion_field.h"
#include "gvv/regularizers/entropy.h"
#include "gvv/regularizers/temporal.h"

namespace gvv::cli {

namespace {

struct FitArgs {
  std::string prev;
  std::string next;
  std::string out;
  std::string field;
  std::string objective = "chamfer";
  int iterations = 500;
  double lr_tables = 1e-2;
  double lr_mlp = 1e-3;
  int hidden = 64;
  std::uint64_t seed = 0;
};

struct LossArgs {
  std::string prev;
  std::string cur;
  std::string out;
  bool noise = false;
  std::uint64_t seed = 0;
  bool gradients = false;
  double photometric = 0.0;
  double dssim = 0.0;
};

}  // namespace

Action add_fit_motion(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<FitArgs>();
  auto* sub = app.add_subcommand(
      "fit-motion", "Fit a hash-grid motion field warping one splat cloud onto the next");
  sub->add_option("prev", a->prev, "Source splat file")->required();
  sub->add_option("next", a->next, "Target splat file")->required();
  sub->add_option("--out", a->out, "Warped source cloud to write")->required();
  sub->add_option("--field", a->field, "Field checkpoint to write");
  sub->add_option("--objective", a->objective,
                  "chamfer: unordered target; l2: target splat i matches source splat i")
      ->check(CLI::IsMember({"chamfer", "l2"}))
      ->capture_default_str();
  sub->add_option("--iterations", a->iterations, "Optimizer steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--lr-tables", a->lr_tables, "Hash table learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--lr-mlp", a->lr_mlp, "MLP learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--hidden", a->hidden, "MLP hidden width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", a->seed, "MLP initialisation seed")->capture_default_str();

  return [a, &ctx] {
    const auto prev = read_splats(a->prev);
    const auto next = read_splats(a->next);
    const Eigen::Matrix3Xf x = frame_positions(prev);
    Eigen::Matrix3Xf target = frame_positions(next);
    MotionObjective objective;
    if (a->objective == "l2") {
      if (prev.size() != next.size()) {
        throw Error(ErrorKind::kMismatch, "l2 needs equal splat counts; use --objective chamfer");
      }
      objective = supervised_l2(std::move(target));
    } else {
      objective = chamfer_objective(std::move(target));
    }
    FitOptions opt;
    opt.iterations = a->iterations;
    opt.lr_tables = a->lr_tables;
    opt.lr_mlp = a->lr_mlp;
    opt.hidden = a->hidden;
    opt.seed = a->seed;
    const auto fit = fit_motion(x, objective, opt);
    write_splats(a->out, apply_delta(prev, fit.field.predict_delta(x)));
    if (!a->field.empty()) write_checkpoint(fit.field, a->field);
    char line[160];
    std::snprintf(line, sizeof(line), "%s loss %.6g -> %.6g in %d iterations, %.2f s\n",
                  a->objective.c_str(), fit.initial_loss, fit.final_loss, a->iterations,
                  fit.seconds);
    ctx.out << line;
  };
}

Action add_losses(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<LossArgs>();
  auto* sub = app.add_subcommand(
      "losses", "Dump entropy and temporal loss values (and gradients) for a frame pair as JSON");
  sub->add_option("prev", a->prev, "Previous frame splat file")->required();
  sub->add_option("cur", a->cur, "Current frame splat file")->required();
  sub->add_option("--out", a->out, "JSON path (default stdout)");
  sub->add_flag("--noise", a->noise, "Add uniform rounding noise to the residuals");
  sub->add_option("--seed", a->seed, "Noise seed")->capture_default_str();
  sub->add_flag("--gradients", a->gradients, "Include per-element gradients");
  sub->add_option("--photometric", a->photometric, "External photometric term for the total")
      ->capture_default_str();
  sub->add_option("--dssim", a->dssim, "External D-SSIM term for the total")->capture_default_str();

  return [a, &ctx] {
    const auto prev = read_splats(a->prev);
    const auto cur = read_splats(a->cur);
    if (prev.size() != cur.size() || prev.sh_degree != cur.sh_degree) {
      throw Error(ErrorKind::kMismatch, "frames differ in splat count or SH degree");
    }
    const auto layout = attribute_layout(cur.sh_degree);
    const std::size_t n = cur.size();

    // One residual array per attribute, channel-major, each channel scaled
    // by its range over both frames.
    std::vector<std::vector<double>> yhat;
    std::vector<LayoutEntry> entries;
    for (const auto& e : layout.entries) {
      if (e.channels == 0) continue;
      entries.push_back(e);
      std::vector<double> lo(e.channels), hi(e.channels);
      std::vector<std::vector<double>> yt(e.channels), yp(e.channels);
      for (int c = 0; c < e.channels; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
          yt[c].push_back(attribute_value(cur.splats[i], e.attribute, c));
          yp[c].push_back(attribute_value(prev.splats[i], e.attribute, c));
        }
        const auto [t0, t1] = std::minmax_element(yt[c].begin(), yt[c].end());
        const auto [p0, p1] = std::minmax_element(yp[c].begin(), yp[c].end());
        lo[c] = std::min(*t0, *p0);
        hi[c] = std::max(*t1, *p1);
      }
      const QuantRange range = make_range(lo, hi, e.bits);
      std::vector<double> all;
      for (int c = 0; c < e.channels; ++c) {
        const auto r = residual_quantize(yt[c], yp[c], range.min[c], range.max[c],
                                         default_regions(e.bits), a->noise,
                                         a->seed + 1000003ull * e.first_channel + c);
        all.insert(all.end(), r.begin(), r.end());
      }
      yhat.push_back(std::move(all));
    }
    std::vector<EntropyParams> params;
    for (const auto& y : yhat) params.push_back(fit_entropy_params(y));
    const auto entropy = entropy_loss(yhat, params, n);
    const auto temporal = temporal_loss(appearance_planes(cur), appearance_planes(prev));

    nlohmann::json j;
    j["splats"] = n;
    j["sh_degree"] = cur.sh_degree;
    j["noise"] = a->noise;
    j["seed"] = a->seed;
    j["entropy_bits"] = entropy.bits;
    j["temporal"] = temporal.value;
    j["total"] = combine_losses(a->photometric, a->dssim, entropy.bits, temporal.value);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      nlohmann::json attr;
      attr["name"] = attribute_name(entries[k].attribute);
      attr["mu"] = params[k].mu;
      attr["sigma"] = params[k].sigma;
      attr["d_mu"] = entropy.d_mu[k];
      attr["d_sigma"] = entropy.d_sigma[k];
      if (a->gradients) {
        attr["yhat"] = yhat[k];
        attr["d_yhat"] = entropy.d_yhat[k];
      }
      j["attributes"].push_back(attr);
    }
    if (a->gradients) j["temporal_gradient"] = temporal.gradient;

    const std::string text = j.dump(2) + "\n";
    if (a->out.empty()) {
      ctx.out << text;
    } else {
      std::ofstream f(a->out);
      f << text;
      if (!f) throw Error(ErrorKind::kIo, "cannot write " + a->out);
    }
  };
}

}  // namespace gvv::cli
