// ar2can command-line front end. stdout carries JSON or CSV only; anything
// meant for a human goes to stderr.
//
// Exit codes: 0 ok, 2 bad input, 3 domain invariant violated, 4 internal.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "ar2can/batch.hpp"
#include "ar2can/canvas.hpp"
#include "ar2can/curriculum.hpp"
#include "ar2can/error.hpp"
#include "ar2can/grpo.hpp"
#include "ar2can/io.hpp"
#include "ar2can/oracles.hpp"
#include "ar2can/synthetic.hpp"
#include "ar2can/token_plan.hpp"

using namespace ar2can;

namespace {

struct EvaluateArgs {
  std::string layout, detections, refs, prompt, weights = "0.2,0.4,0.3,0.1", image;
  std::optional<double> quality;
  std::uint64_t seed = 0;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const Layout layout = layout_from_json(read_json_file(a.layout));
  validate_layout(layout);
  std::vector<FaceObservation> faces = filter_by_confidence(detections_from_json(read_json_file(a.detections)));
  const std::vector<ReferenceIdentity> refs = refs_from_json(read_json_file(a.refs));
  const RewardWeights weights = parse_weights(a.weights);
  weights.validate();

  std::optional<RasterImage> image;
  if (!a.image.empty()) image = read_ppm(a.image);
  if (image) {
    const HashEmbedder embedder;
    for (auto& f : faces)
      if (!f.embedding) f.embedding = normalized(embedder.embed(crop_box(*image, f.box)));
  }
  double quality = 0.0;
  if (a.quality) {
    quality = *a.quality;
    if (!std::isfinite(quality)) throw InputError("--quality must be finite");
  } else {
    quality = HashQualityOracle(a.seed).score(image ? *image : RasterImage(1, 1, kBlank), a.prompt);
  }

  const bool frontal = prompt_requests_frontal(a.prompt);
  const ArtistRewardResult r = evaluate_artist_reward(layout, faces, refs, quality, weights, frontal);
  json out = breakdown_to_json(r.breakdown);
  out["weights"] = {weights.alpha, weights.beta, weights.zeta, weights.eta};
  out["frontal_active"] = frontal;
  out["detections_used"] = faces.size();
  out["assignment"] = assignment_to_json(r.assignment);
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct TrainArgs {
  ToyTrainConfig cfg;
  std::string task = "count", out;
  bool curriculum = false;
  int tau = 100;
};

int cmd_train_toy(TrainArgs a) {
  if (a.curriculum) {
    a.cfg.curriculum = CurriculumConfig{};
    a.cfg.curriculum->tau = a.tau;
    a.cfg.curriculum->validate();
  }
  ToyRewardFn fn;
  if (a.task == "count") fn = count_task_reward;
  else if (a.task == "artist") fn = artist_task_reward;
  else throw InputError("unknown --task \"" + a.task + "\" (count, artist)");

  TrainingTrace trace;
  try {
    trace = toy_grpo_train(fn, a.cfg);
  } catch (const TrainingDiverged& e) {
    std::cerr << e.trace().to_csv();
    throw;
  }
  const std::string csv = trace.to_csv();
  if (a.out.empty()) std::cout << csv;
  else write_text(a.out, csv);
  if (!trace.rows.empty()) {
    const auto& last = trace.rows.back();
    std::fprintf(stderr, "epochs %d final mean reward %.6f p(target=%d) %.6f kl %.6g\n", last.epoch,
                 last.mean_reward, last.target, last.p_target, last.kl);
  } else {
    std::fprintf(stderr, "epochs 0\n");
  }
  return 0;
}

struct CurriculumArgs {
  int tau = 100;
  std::optional<int> epoch;
  std::optional<int> epochs;
  int draws = 10000;
  std::uint64_t seed = 0;
};

int cmd_curriculum_stats(const CurriculumArgs& a) {
  CurriculumConfig cfg;
  cfg.tau = a.tau;
  cfg.validate();
  if (a.draws < 0) throw InputError("--draws must be >= 0");
  if (a.epoch && a.epochs) throw InputError("--epoch and --epochs are exclusive");
  std::vector<int> epochs;
  if (a.epochs) {
    if (*a.epochs < 1) throw InputError("--epochs must be >= 1");
    for (int t = 1; t <= *a.epochs; ++t) epochs.push_back(t);
  } else {
    const int t = a.epoch.value_or(1);
    if (t < 1) throw InputError("--epoch must be >= 1");
    epochs.push_back(t);
  }
  CurriculumSampler sampler(a.seed, cfg);
  std::cout << "epoch,count,probability,empirical\n";
  for (int t : epochs) {
    std::map<int, int> hist;
    for (int i = 0; i < a.draws; ++i) ++hist[sampler.sample(t)];
    for (int n : cfg.buckets) {
      const double emp = a.draws ? static_cast<double>(hist[n]) / a.draws : 0.0;
      std::printf("%d,%d,%.17g,%.17g\n", t, n, bucket_probability(n, t, cfg), emp);
    }
  }
  return 0;
}

struct CanvasArgs {
  int n = 3, width = 256, height = 256;
  std::uint64_t seed = 0;
  std::string mix = "0.5,0.4,0.1", out = "canvases", id;
  bool pose = false;
};

int cmd_build_canvases(const CanvasArgs& a) {
  if (a.n < 2 || a.n > 7) throw InputError("--n must be in [2, 7]");
  const auto p = parse_csv_doubles(a.mix);
  if (p.size() != 3) throw InputError("--mix must be three comma-separated probabilities");
  const SourceMix mix{p[0], p[1], p[2]};
  const SyntheticScene scene = generate_scene(a.n, a.width, a.height, a.seed);
  std::vector<RasterImage> crops;
  for (int i = 0; i < a.n; ++i) crops.push_back(synthetic_face_crop(a.seed * 1000 + i, 32));
  CanvasExtras extras;
  extras.poses = scene.poses;
  const CanvasSample s = construct_canvas(scene.image, scene.faces, crops, mix, a.pose, a.seed, extras);
  const auto dir = write_canvas_sample(a.out, a.id.empty() ? std::to_string(a.seed) : a.id, s);
  json sources = json::array();
  for (auto src : s.sources) sources.push_back(static_cast<int>(src));
  std::cout << json{{"dir", dir.string()}, {"canvases", s.canvases.size()}, {"sources", sources},
                    {"pose", a.pose}}.dump(2)
            << "\n";
  return 0;
}

struct TokenStatsArgs {
  int layouts = 200, patch_size = kDefaultPatchSize, width = 512, height = 512, bins = 10;
  std::uint64_t seed = 0;
};

int cmd_token_stats(const TokenStatsArgs& a) {
  if (a.layouts < 1) throw InputError("--layouts must be >= 1");
  if (a.bins < 1) throw InputError("--bins must be >= 1");
  const PatchGrid grid = PatchGrid::for_image(a.width, a.height, a.patch_size);
  std::mt19937_64 rng(a.seed);
  std::vector<Layout> layouts;
  for (int i = 0; i < a.layouts; ++i) layouts.push_back(random_layout(rng));
  const std::vector<double> f = batch::reduction_factors(grid, layouts);
  double mean = 0.0;
  for (double x : f) mean += x;
  mean /= static_cast<double>(f.size());
  const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
  const double lo = *lo_it, hi = *hi_it, width = (hi - lo) / a.bins;
  std::vector<int> counts(a.bins, 0);
  for (double x : f) {
    const int b = width > 0.0 ? std::min(a.bins - 1, static_cast<int>((x - lo) / width)) : 0;
    ++counts[b];
  }
  std::cout << "bin_lo,bin_hi,count,mean_factor\n";
  for (int b = 0; b < a.bins; ++b)
    std::printf("%.17g,%.17g,%d,%.17g\n", lo + b * width, b + 1 == a.bins ? hi : lo + (b + 1) * width,
                counts[b], mean);
  return 0;
}

struct PlanArgs {
  std::string layout;
  int patch_size = kDefaultPatchSize, width = 512, height = 512;
  std::vector<std::size_t> unshared;
};

int cmd_plan_tokens(const PlanArgs& a) {
  const Layout layout = layout_from_json(read_json_file(a.layout));
  const PatchGrid grid = PatchGrid::for_image(a.width, a.height, a.patch_size);
  const TokenPlan plan = plan_tokens(grid, layout, {a.unshared});
  json out = token_plan_to_json(plan);
  if (plan.total_kept() > 0) out["reduction_factor"] = reduction_factor(plan);
  std::cout << out.dump(2) << "\n";
  return 0;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ar2can: reward, GRPO, canvas and token-plan utilities"};
  app.require_subcommand(1);
  std::function<int()> run;

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score one generation against its layout and references");
  evaluate->add_option("--layout", ev.layout, "layout JSON")->required();
  evaluate->add_option("--detections", ev.detections, "detections JSON")->required();
  evaluate->add_option("--refs", ev.refs, "reference identities JSON")->required();
  evaluate->add_option("--prompt", ev.prompt, "prompt text");
  evaluate->add_option("--weights", ev.weights, "alpha,beta,zeta,eta")->capture_default_str();
  evaluate->add_option("--quality", ev.quality, "quality score; hashed from image and prompt if omitted");
  evaluate->add_option("--image", ev.image, "generated image (PPM)");
  evaluate->add_option("--seed", ev.seed, "quality oracle seed");
  evaluate->callback([&] { run = [&] { return cmd_evaluate(ev); }; });

  TrainArgs tr;
  auto* train = app.add_subcommand("train-toy", "Run toy GRPO on a categorical count policy, CSV trace");
  train->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  train->add_option("--group-size", tr.cfg.group_size)->capture_default_str();
  train->add_option("--lr", tr.cfg.learning_rate)->capture_default_str();
  train->add_option("--beta-kl", tr.cfg.beta_kl)->capture_default_str();
  train->add_option("--epsilon", tr.cfg.epsilon)->capture_default_str();
  train->add_option("--seed", tr.cfg.seed)->capture_default_str();
  train->add_option("--target", tr.cfg.target)->capture_default_str();
  train->add_option("--outcomes", tr.cfg.outcomes)->capture_default_str();
  train->add_option("--task", tr.task, "count or artist")->capture_default_str();
  train->add_flag("--curriculum", tr.curriculum, "draw targets from the person-count curriculum");
  train->add_option("--tau", tr.tau)->capture_default_str();
  train->add_flag("--parallel-rewards", tr.cfg.parallel_rewards);
  train->add_option("--out", tr.out, "CSV path (stdout if omitted)");
  train->callback([&] { run = [&] { return cmd_train_toy(tr); }; });

  CurriculumArgs cu;
  auto* curr = app.add_subcommand("curriculum-stats", "Exact and sampled person-count probabilities, CSV");
  curr->add_option("--tau", cu.tau)->capture_default_str();
  curr->add_option("--epoch", cu.epoch, "single epoch (default 1)");
  curr->add_option("--epochs", cu.epochs, "every epoch 1..E");
  curr->add_option("--draws", cu.draws)->capture_default_str();
  curr->add_option("--seed", cu.seed)->capture_default_str();
  curr->callback([&] { run = [&] { return cmd_curriculum_stats(cu); }; });

  CanvasArgs ca;
  auto* canv = app.add_subcommand("build-canvases", "Build one split-canvas sample from a synthetic scene");
  canv->add_option("--n", ca.n, "people in the scene")->capture_default_str();
  canv->add_option("--seed", ca.seed)->capture_default_str();
  canv->add_option("--width", ca.width)->capture_default_str();
  canv->add_option("--height", ca.height)->capture_default_str();
  canv->add_option("--mix", ca.mix, "p1,p2,p3")->capture_default_str();
  canv->add_flag("--pose", ca.pose, "overlay skeletons");
  canv->add_option("--out", ca.out, "output root")->capture_default_str();
  canv->add_option("--id", ca.id, "sample id (defaults to the seed)");
  canv->callback([&] { run = [&] { return cmd_build_canvases(ca); }; });

  TokenStatsArgs ts;
  auto* tok = app.add_subcommand("token-stats", "Reduction-factor histogram over random layouts, CSV");
  tok->add_option("--layouts", ts.layouts)->capture_default_str();
  tok->add_option("--seed", ts.seed)->capture_default_str();
  tok->add_option("--patch-size", ts.patch_size)->capture_default_str();
  tok->add_option("--width", ts.width)->capture_default_str();
  tok->add_option("--height", ts.height)->capture_default_str();
  tok->add_option("--bins", ts.bins)->capture_default_str();
  tok->callback([&] { run = [&] { return cmd_token_stats(ts); }; });

  PlanArgs pl;
  auto* plan = app.add_subcommand("plan-tokens", "Token plan for one layout, JSON");
  plan->add_option("--layout", pl.layout)->required();
  plan->add_option("--patch-size", pl.patch_size)->capture_default_str();
  plan->add_option("--width", pl.width)->capture_default_str();
  plan->add_option("--height", pl.height)->capture_default_str();
  plan->add_option("--unshared", pl.unshared, "canvas indices with sharing disabled")->delimiter(',');
  plan->callback([&] { run = [&] { return cmd_plan_tokens(pl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return guarded(run);
}
