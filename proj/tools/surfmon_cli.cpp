#include <iostream>

#include "CLI11.hpp"
#include "surfmon/commands.hpp"
#include "surfmon/kernels.hpp"

int main(int argc, char** argv) {
  using namespace surfmon;

  CLI::App app{"Windowed segmentation defect detection and EWMA monitoring"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 7;
  app.add_option("--config", config, "Pipeline configuration JSON");
  app.add_option("--out", out, "Primary output path (stdout when omitted)");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for synthetic data");
  app.add_flag_callback("--kernels", [] { std::cout << kernels::active().name << '\n'; std::exit(0); },
                        "Print the active pixel-kernel variant and exit");

  DetectOptions detect;
  auto* detect_cmd = app.add_subcommand("detect", "Analyze one image (exit 0 fault free, 2 faulty, 1 error)");
  detect_cmd->add_option("image", detect.image)->required();
  detect_cmd->add_option("--limits", detect.limits, "Limits file supplying a calibrated decision threshold");
  detect_cmd->add_option("--image-id", detect.image_id, "Image id (defaults to the file stem)");

  CalibrateOptions calibrate;
  double quantile = 0.0;
  double lambda = 0.0;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Derive decision threshold, z0 and UCL from fault-free images");
  calibrate_cmd->add_option("manifest", calibrate.manifest)->required();
  auto* quantile_opt = calibrate_cmd->add_option("--quantile", quantile, "ECDF quantile (default from config)");
  auto* lambda_opt = calibrate_cmd->add_option("--lambda", lambda, "EWMA smoothing (default from config)");

  BatchOptions batch;
  auto* batch_cmd = app.add_subcommand("batch", "Score a labelled manifest and report metrics");
  batch_cmd->add_option("manifest", batch.manifest)->required();
  batch_cmd->add_option("--limits", batch.limits, "Limits file from calibrate");
  batch_cmd->add_option("--metrics", batch.metrics, "Metrics JSON path");

  MonitorOptions monitor;
  auto* monitor_cmd = app.add_subcommand("monitor", "Run the EWMA chart over a score stream");
  monitor_cmd->add_option("scores", monitor.scores)->required();
  monitor_cmd->add_option("--limits", monitor.limits)->required();

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic textured dataset");
  synth_cmd->add_option("out_dir", synth.out_dir)->required();
  synth_cmd->add_option("--count", synth.count, "Images per class");
  synth_cmd->add_option("--calibration", synth.calibration, "Extra fault-free calibration images");
  synth_cmd->add_option("--size", synth.size, "Image side length");
  synth_cmd->add_option("--texture", synth.texture)->check(CLI::IsMember({"flat", "stripes", "value_noise"}));
  synth_cmd->add_option("--min-size", synth.min_size, "Smallest blob pixel count");
  synth_cmd->add_option("--max-size", synth.max_size, "Largest blob pixel count");
  synth_cmd->add_option("--delta", synth.intensity_delta, "Blob darkening");

  EvaluateOptions evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Metrics from a predictions CSV (EWMA mode with --limits)");
  evaluate_cmd->add_option("predictions", evaluate.predictions)->required();
  evaluate_cmd->add_option("--limits", evaluate.limits);

  OverlayOptions overlay;
  auto* overlay_cmd = app.add_subcommand("overlay", "Draw retained masks from a report onto the image");
  overlay_cmd->add_option("image", overlay.image)->required();
  overlay_cmd->add_option("report", overlay.report)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (detect_cmd->parsed()) {
    detect.config = config;
    detect.out = out;
    detect.workers = workers;
    return cmd_detect(detect, std::cout, std::cerr);
  }
  if (calibrate_cmd->parsed()) {
    calibrate.config = config;
    calibrate.out = out;
    calibrate.workers = workers;
    if (*quantile_opt) calibrate.quantile = quantile;
    if (*lambda_opt) calibrate.lambda = lambda;
    return cmd_calibrate(calibrate, std::cout, std::cerr);
  }
  if (batch_cmd->parsed()) {
    batch.config = config;
    batch.out = out;
    batch.workers = workers;
    return cmd_batch(batch, std::cout, std::cerr);
  }
  if (monitor_cmd->parsed()) {
    monitor.out = out;
    return cmd_monitor(monitor, std::cout, std::cerr);
  }
  if (synth_cmd->parsed()) {
    synth.config = config;
    synth.seed = seed;
    return cmd_synth(synth, std::cout, std::cerr);
  }
  if (evaluate_cmd->parsed()) {
    evaluate.out = out;
    return cmd_evaluate(evaluate, std::cout, std::cerr);
  }
  if (overlay_cmd->parsed()) {
    overlay.out = out;
    return cmd_overlay(overlay, std::cout, std::cerr);
  }
  return 1;
}
