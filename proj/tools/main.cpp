#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "ovtrack/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSemantic = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-vocabulary multi-object tracking and evaluation toolkit"};
  app.require_subcommand(1);

  ovtrack::cli::TrackOptions track;
  auto* track_cmd = app.add_subcommand(
      "track", "Associate per-frame detections into tracks");
  track_cmd->add_option("--detections", track.detections,
                        "Detection stream (JSONL)")->required();
  track_cmd->add_option("--vocab", track.vocab, "Class vocabulary (JSON)")
      ->required();
  track_cmd->add_option("--out", track.out, "Track output (JSONL)")->required();
  track_cmd->add_option("--beta", track.beta,
                        "Bi-softmax match threshold (default 0.5)");
  track_cmd->add_option("--gamma", track.gamma,
                        "New-track confidence threshold (default 1e-4)");
  track_cmd->add_option("--beta-obj", track.beta_obj,
                        "Detection score gate for matches (default 0.3, "
                        "implementation choice)");
  track_cmd->add_option("--memory", track.memory,
                        "Track memory length in frames (default 10)");
  track_cmd->add_option("--cosine-gate", track.cosine_gate,
                        "Minimum raw cosine for a match (default 0.3, "
                        "implementation choice)");
  track_cmd->add_option("--nms", track.nms,
                        "Duplicate-removal IoU threshold (default 0.5)");
  track_cmd->add_option("--nms-mode", track.nms_mode,
                        "Duplicate removal scope: agnostic | class")
      ->check(CLI::IsMember({"agnostic", "class"}));
  track_cmd->add_option("--lambda", track.lambda,
                        "Classification softmax temperature (default 0.07)");

  ovtrack::cli::EvalOptions eval;
  auto* eval_cmd =
      app.add_subcommand("eval", "Score tracks against ground truth");
  eval_cmd->add_option("--tracks", eval.tracks, "Track file (JSONL)")
      ->required();
  eval_cmd->add_option("--gt", eval.gt, "Ground truth (JSON)")->required();
  eval_cmd->add_option("--vocab", eval.vocab, "Class vocabulary (JSON)")
      ->required();
  eval_cmd->add_option("--metric", eval.metric, "teta | trackmap | both")
      ->check(CLI::IsMember({"teta", "trackmap", "both"}));
  eval_cmd->add_option("--split", eval.split,
                       "Class split to report: all | base | novel")
      ->check(CLI::IsMember({"all", "base", "novel"}));
  eval_cmd->add_option("--report", eval.report, "JSON report output path");
  eval_cmd->add_option("--loc-iou", eval.loc_iou,
                       "Localization match IoU threshold (default 0.5, "
                       "implementation choice)");
  eval_cmd->add_option("--assoc-counts", eval.assoc_counts,
                       "Association error accounting: hota | tpl")
      ->check(CLI::IsMember({"hota", "tpl"}));
  eval_cmd->add_option("--thresholds", eval.thresholds,
                       "Track-mAP IoU thresholds (default 0.5 0.75)");

  ovtrack::cli::SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Generate a synthetic detection/ground-truth scenario");
  sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  sim_cmd->add_option("--seed", sim.seed, "Random seed (default 0)");
  sim_cmd->add_option("--videos", sim.videos, "Video count (default 1)");
  sim_cmd->add_option("--frames", sim.frames, "Frames per video (default 20)");
  sim_cmd->add_option("--identities", sim.identities,
                      "Identities per video (default 4)");
  sim_cmd->add_option("--embed-dim", sim.embed_dim,
                      "Embedding dimension (default 32)");
  sim_cmd->add_option("--classes", sim.classes, "Class count (default 4)");
  sim_cmd->add_option("--noise", sim.noise,
                      "Appearance noise stdev (default 0)");
  sim_cmd->add_option("--fn", sim.fn, "False-negative rate (default 0)");
  sim_cmd->add_option("--fp", sim.fp, "Clutter rate (default 0)");
  sim_cmd->add_option("--jitter", sim.jitter, "Box jitter in px (default 0)");
  sim_cmd->add_option("--occlusion", sim.occlusions,
                      "Occlusion window identity:start:length (repeatable)");

  ovtrack::cli::GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "Verify analytic loss gradients against finite differences");
  grad_cmd->add_option("--loss", grad.loss, "track | aux | all")
      ->check(CLI::IsMember({"track", "aux", "all"}));
  grad_cmd->add_option("--seed", grad.seed, "Random seed (default 7)");
  grad_cmd->add_option("--instances", grad.instances,
                       "Random instances per loss (default 100)");
  grad_cmd->add_option("--dim", grad.dim,
                       "Maximum embedding dimension (default 8)");
  grad_cmd->add_option("--step", grad.step,
                       "Finite difference step (default 1e-4)");
  grad_cmd->add_option("--report", grad.report, "JSON report output path");

  ovtrack::cli::HallucinateOptions halluc;
  auto* halluc_cmd = app.add_subcommand(
      "hallucinate", "Run the masked denoising loop over a value grid");
  halluc_cmd->add_option("--input", halluc.input,
                         "Input grid (.png or OVTG raw)")->required();
  halluc_cmd->add_option("--mask", halluc.mask,
                         "Foreground mask (.png or OVTG raw); all-zero when "
                         "omitted");
  halluc_cmd->add_option("--out", halluc.out, "Output grid path")->required();
  halluc_cmd->add_option("--delta0", halluc.delta0,
                         "Initial noise level (default 0.75)");
  halluc_cmd->add_option("--steps", halluc.steps,
                         "Denoising steps (default 50)");
  halluc_cmd->add_option("--eta", halluc.eta,
                         "Homogenization threshold (default 0.02)");
  halluc_cmd->add_option("--seed", halluc.seed, "Random seed (default 0)");
  halluc_cmd->add_flag("--deterministic", halluc.deterministic,
                       "Zero-variance sampling");
  halluc_cmd->add_option("--caption", halluc.caption,
                         "Conditioning token passed to the denoiser");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (track_cmd->parsed()) return ovtrack::cli::run_track(track);
    if (eval_cmd->parsed()) return ovtrack::cli::run_eval(eval);
    if (sim_cmd->parsed()) return ovtrack::cli::run_simulate(sim);
    if (grad_cmd->parsed()) return ovtrack::cli::run_gradcheck(grad);
    if (halluc_cmd->parsed()) return ovtrack::cli::run_hallucinate(halluc);
  } catch (const ovtrack::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  } catch (const ovtrack::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSemantic;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitParse;
  }
  return kExitOk;
}
