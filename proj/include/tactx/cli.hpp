#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tactx/config.hpp"
#include "tactx/contact.hpp"
#include "tactx/formats.hpp"
#include "tactx/pipeline.hpp"
#include "tactx/render.hpp"

// Command-line front end. Results go to files only; progress and errors go
// to standard error. Exit codes: 0 success, 1 usage error, 2 runtime error.
namespace tactx::cli {

namespace detail {

inline void note(const std::string& msg) {
  std::cerr << msg << "\n";
}

inline void ensure_parent(const std::filesystem::path& path) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

// image.ppm -> image_3.ppm for multi-signal conversions.
inline std::filesystem::path indexed_path(const std::filesystem::path& path, std::size_t i) {
  std::filesystem::path out = path.parent_path() / path.stem();
  out += "_" + std::to_string(i);
  out += path.extension();
  return out;
}

inline pipeline::NetRole role_from_name(const std::string& name) {
  if (name == "svb") return pipeline::NetRole::svb;
  if (name == "mvb") return pipeline::NetRole::mvb;
  if (name == "mvd") return pipeline::NetRole::mvd;
  if (name == "s2mpn") return pipeline::NetRole::s2mpn;
  if (name == "m2mpn") return pipeline::NetRole::m2mpn;
  throw DomainError("unknown network name '" + name + "'");
}

inline nn::EpochHook epoch_note(std::size_t total) {
  return [total](std::size_t epoch, double loss) {
    if (epoch == 0 || (epoch + 1) % 25 == 0 || epoch + 1 == total) {
      std::ostringstream os;
      os << "  epoch " << (epoch + 1) << "/" << total << "  loss " << std::scientific
         << std::setprecision(4) << loss;
      note(os.str());
    }
  };
}

inline std::string format_report(const pipeline::EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "samples                       " << r.samples.size() << "\n";
  os << "mean_centroid_error_mm        " << r.mean_centroid_error_mm << "\n";
  os << "median_centroid_error_mm      " << r.median_centroid_error_mm << "\n";
  os << "mean_depth_rel_error          " << r.mean_depth_rel_error << "\n";
  os << "median_depth_rel_error        " << r.median_depth_rel_error << "\n";
  os << "mean_biotac_recon_mse         " << r.mean_biotac_recon_mse << "\n";
  os << "mean_digit_recon_mse          " << r.mean_digit_recon_mse << "\n";
  os << "mean_image_centroid_error_px  " << r.mean_image_centroid_error_px << "\n";
  os << "centroid_pass_rate            " << r.centroid_pass_rate << "   # within "
     << pipeline::kCentroidPassMm << " mm\n";
  os << "depth_pass_rate               " << r.depth_pass_rate << "   # within "
     << pipeline::kDepthPassRel << " relative\n";
  os << "image_pass_rate               " << r.image_pass_rate << "   # within "
     << pipeline::kImagePassPx << " px\n";
  os << "\nper-sample: centroid_mm depth_rel biotac_mse digit_mse image_px\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const pipeline::EvalSample& e = r.samples[i];
    os << std::setw(4) << i << "  " << e.centroid_error_mm << "  " << e.depth_rel_error << "  "
       << e.biotac_recon_mse << "  " << e.digit_recon_mse << "  " << e.image_centroid_error_px
       << "\n";
  }
  return os.str();
}

inline void run_gen_data(std::size_t count, std::uint64_t seed, const std::string& out,
                         const std::string& ranges_file) {
  const SampleRanges ranges = ranges_file.empty() ? SampleRanges{} : io::read_ranges(ranges_file);
  note("generating " + std::to_string(count) + " paired samples (seed " + std::to_string(seed) +
       ")");
  const std::vector<PairedSample> samples = generate_paired_dataset(count, seed, ranges);
  ensure_parent(out);
  io::write_dataset(out, samples);
  note("wrote dataset -> " + out);
}

inline void run_train(const std::string& net, const std::string& data, const std::string& out,
                      const std::string& config_file) {
  const std::vector<PairedSample> samples = io::read_dataset(data);
  note("loaded " + std::to_string(samples.size()) + " samples from " + data);
  const pipeline::PipelineConfig cfg = config_file.empty()
                                           ? pipeline::default_pipeline_config(0)
                                           : io::read_pipeline_config(config_file);

  if (net == "all") {
    std::size_t current_total = 0;
    const auto stage = [&](const std::string& msg) { note(msg); };
    // train_pipeline announces each stage; the epoch hook needs the matching
    // total, so wire it per stage via a mutable capture updated in order.
    const std::size_t totals[] = {cfg.svb_hyper.epochs, cfg.mvb_hyper.epochs,
                                  cfg.mvd_hyper.epochs, cfg.s2mpn_hyper.epochs,
                                  cfg.m2mpn_hyper.epochs};
    std::size_t stage_index = 0;
    const pipeline::StageHook hook = [&](const std::string& msg) {
      current_total = totals[std::min<std::size_t>(stage_index, 4)];
      ++stage_index;
      stage(msg);
    };
    const nn::EpochHook per_epoch = [&](std::size_t epoch, double loss) {
      epoch_note(current_total)(epoch, loss);
    };
    const pipeline::PipelineModels models = pipeline::train_pipeline(samples, cfg, hook, per_epoch);
    io::write_models(out, models);
    note("wrote networks -> " + out);
    return;
  }

  const pipeline::DatasetSplit split = pipeline::split_dataset(samples.size(), cfg.split_seed);
  const pipeline::NetRole role = role_from_name(net);
  ensure_parent(out);

  // Single-network runs retrain only the stages the requested network needs,
  // with the same seeds and data slices as a full run, so the written file
  // is byte-identical to its counterpart from `--net all`.
  switch (role) {
    case pipeline::NetRole::svb: {
      note("training svb");
      const num::Matrix sig = pipeline::pack_signals(samples, split.train);
      const nn::VaeModel m =
          nn::train_network(cfg.svb_arch, sig, cfg.svb_hyper, epoch_note(cfg.svb_hyper.epochs))
              .model;
      io::write_network(out, role, m);
      break;
    }
    case pipeline::NetRole::mvb: {
      note("training mvb");
      const num::Matrix bio = pipeline::pack_fields(samples, split.train, SensorKind::biotac);
      const nn::VaeModel m = nn::train_network(cfg.mvb_arch, pipeline::augment_with_mirrors(bio),
                                               cfg.mvb_hyper, epoch_note(cfg.mvb_hyper.epochs))
                                 .model;
      io::write_network(out, role, m);
      break;
    }
    case pipeline::NetRole::mvd: {
      note("training mvd");
      const num::Matrix dig = pipeline::pack_fields(samples, split.train, SensorKind::digit);
      const nn::VaeModel m = nn::train_network(cfg.mvd_arch, pipeline::augment_with_mirrors(dig),
                                               cfg.mvd_hyper, epoch_note(cfg.mvd_hyper.epochs))
                                 .model;
      io::write_network(out, role, m);
      break;
    }
    case pipeline::NetRole::s2mpn: {
      note("training svb and mvb prerequisites");
      const num::Matrix sig = pipeline::pack_signals(samples, split.train);
      const num::Matrix bio = pipeline::pack_fields(samples, split.train, SensorKind::biotac);
      const nn::VaeModel svb = nn::train_network(cfg.svb_arch, sig, cfg.svb_hyper).model;
      const nn::VaeModel mvb =
          nn::train_network(cfg.mvb_arch, pipeline::augment_with_mirrors(bio), cfg.mvb_hyper)
              .model;
      note("training s2mpn");
      const num::Matrix z_sig = nn::vae_encode_mean(svb, sig);
      const num::Matrix z_bio = nn::vae_encode_mean(mvb, bio);
      const nn::MlpModel m = nn::train_network(cfg.s2mpn_arch, z_sig, z_bio, cfg.s2mpn_hyper,
                                               epoch_note(cfg.s2mpn_hyper.epochs))
                                 .model;
      io::write_network(out, role, m);
      break;
    }
    case pipeline::NetRole::m2mpn: {
      note("training mvb and mvd prerequisites");
      const num::Matrix bio = pipeline::pack_fields(samples, split.train, SensorKind::biotac);
      const num::Matrix dig = pipeline::pack_fields(samples, split.train, SensorKind::digit);
      const nn::VaeModel mvb =
          nn::train_network(cfg.mvb_arch, pipeline::augment_with_mirrors(bio), cfg.mvb_hyper)
              .model;
      const nn::VaeModel mvd =
          nn::train_network(cfg.mvd_arch, pipeline::augment_with_mirrors(dig), cfg.mvd_hyper)
              .model;
      note("training m2mpn");
      const num::Matrix z_bio = nn::vae_encode_mean(mvb, bio);
      const num::Matrix z_dig = nn::vae_encode_mean(mvd, dig);
      const nn::MlpModel m = nn::train_network(cfg.m2mpn_arch, z_bio, z_dig, cfg.m2mpn_hyper,
                                               epoch_note(cfg.m2mpn_hyper.epochs))
                                 .model;
      io::write_network(out, role, m);
      break;
    }
  }
  note("wrote network -> " + out);
}

inline void run_fit_calib(const std::string& out) {
  note("rendering calibration poses");
  const auto samples = render::generate_calibration_set(render::default_light_rig());
  note("fitting polynomial table on " + std::to_string(samples.size()) + " samples");
  const render::CalibrationTable table = render::fit_calibration(samples);
  ensure_parent(out);
  io::write_calibration(out, table);
  note("wrote calibration -> " + out);
}

inline void run_convert(const std::string& signal_file, const std::string& models_dir,
                        const std::string& calib_file, const std::string& out,
                        const std::string& dump_dir, bool direct_latent) {
  const pipeline::PipelineModels models = io::read_models(models_dir);
  const render::CalibrationTable calib = io::read_calibration(calib_file);
  const std::vector<ElectrodeFrame> signals = io::read_signal_csv(signal_file);
  note("converting " + std::to_string(signals.size()) + " signal(s)");
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const pipeline::ConvertResult r =
        pipeline::convert(models, calib, signals[i], geom::kDefaultSmoothSigma, direct_latent);
    const std::filesystem::path image_path =
        signals.size() == 1 ? std::filesystem::path(out) : indexed_path(out, i);
    ensure_parent(image_path);
    io::write_ppm(image_path, r.image);
    note("wrote image -> " + image_path.string());
    if (!dump_dir.empty()) {
      const std::filesystem::path dir(dump_dir);
      std::filesystem::create_directories(dir);
      const std::string tag = std::to_string(i);
      io::write_field(dir / ("biotac_" + tag + ".dfld"), r.biotac_field);
      io::write_field(dir / ("digit_" + tag + ".dfld"), r.digit_field);
      io::write_heightmap(dir / ("height_" + tag + ".thmp"), r.height_map);
      note("wrote intermediates -> " + dir.string());
    }
  }
}

inline void run_eval(const std::string& data, const std::string& models_dir,
                     const std::string& calib_file, const std::string& report) {
  const pipeline::PipelineModels models = io::read_models(models_dir);
  const render::CalibrationTable calib = io::read_calibration(calib_file);
  const std::vector<PairedSample> samples = io::read_dataset(data);
  note("evaluating " + std::to_string(samples.size()) + " samples");
  const pipeline::EvalReport r = pipeline::evaluate(models, calib, samples);
  ensure_parent(report);
  io::write_text(report, format_report(r));
  note("wrote report -> " + report);
}

}  // namespace detail

// Arguments exclude the program name. Returns the process exit code instead
// of calling exit(), so tests can drive it in-process.
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"BioTac signal to DIGIT tactile image conversion"};
  app.name("tactx");
  app.require_subcommand(1);

  std::uint64_t gen_count = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_ranges;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate a paired spherical-contact dataset");
  gen->add_option("--count", gen_count, "number of samples")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "base PRNG seed")->required();
  gen->add_option("--out", gen_out, "output dataset file (TDS1)")->required();
  gen->add_option("--ranges", gen_ranges, "sampling-range config file");

  std::string train_net, train_data, train_out, train_config;
  CLI::App* train = app.add_subcommand("train", "Train networks on a dataset");
  train->add_option("--net", train_net, "which network, or 'all'")
      ->required()
      ->check(CLI::IsMember({"svb", "mvb", "mvd", "s2mpn", "m2mpn", "all"}));
  train->add_option("--data", train_data, "training dataset (TDS1)")->required();
  train->add_option("--out", train_out, "output network file, or directory for 'all'")
      ->required();
  train->add_option("--config", train_config, "training config file");

  std::string fit_out;
  CLI::App* fit = app.add_subcommand("fit-calib", "Fit the photometric calibration table");
  fit->add_option("--out", fit_out, "output calibration file (TCAL)")->required();

  std::string conv_signal, conv_models, conv_calib, conv_out, conv_dump;
  bool conv_direct = false;
  CLI::App* conv = app.add_subcommand("convert", "Convert electrode signals to DIGIT images");
  conv->add_option("--signal", conv_signal, "CSV file, one 19-value signal per line")
      ->required();
  conv->add_option("--models", conv_models, "directory holding the five trained networks")
      ->required();
  conv->add_option("--calib", conv_calib, "calibration file (TCAL)")->required();
  conv->add_option("--out", conv_out, "output image (PPM); multi-line inputs get _<i> suffixes")
      ->required();
  conv->add_option("--dump-intermediates", conv_dump,
                   "directory for predicted fields and height maps");
  conv->add_flag("--direct-latent", conv_direct,
                 "project latents directly, skipping the BioTac-field re-encode");

  std::string eval_data, eval_models, eval_calib, eval_report;
  CLI::App* ev = app.add_subcommand("eval", "Evaluate trained networks against a dataset");
  ev->add_option("--data", eval_data, "evaluation dataset (TDS1)")->required();
  ev->add_option("--models", eval_models, "directory holding the five trained networks")
      ->required();
  ev->add_option("--calib", eval_calib, "calibration file (TCAL)")->required();
  ev->add_option("--report", eval_report, "output report text file")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    std::cout << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) {
      detail::run_gen_data(std::size_t(gen_count), gen_seed, gen_out, gen_ranges);
    } else if (train->parsed()) {
      detail::run_train(train_net, train_data, train_out, train_config);
    } else if (fit->parsed()) {
      detail::run_fit_calib(fit_out);
    } else if (conv->parsed()) {
      detail::run_convert(conv_signal, conv_models, conv_calib, conv_out, conv_dump, conv_direct);
    } else if (ev->parsed()) {
      detail::run_eval(eval_data, eval_models, eval_calib, eval_report);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace tactx::cli
