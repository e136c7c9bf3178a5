// fracest command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fracest/fracest.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(fracest_status s) {
  return s == FRACEST_E_INVALID || s == FRACEST_E_REGIME ? kExitValidation : kExitNumerical;
}

void check(fracest_status s) {
  if (s != FRACEST_OK) throw Failure{exit_code_for(s), fracest_last_error()};
}

struct ReportHandle {
  fracest_report* p = nullptr;
  ~ReportHandle() { fracest_report_free(p); }
};

struct SampleHandle {
  fracest_sample* p = nullptr;
  ~SampleHandle() { fracest_sample_free(p); }
};

struct CurveHandle {
  fracest_curve* p = nullptr;
  ~CurveHandle() { fracest_curve_free(p); }
};

struct VectorHandle {
  fracest_vector* p = nullptr;
  ~VectorHandle() { fracest_vector_free(p); }
};

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw Failure{kExitValidation, origin + " must be a nonnegative integer, got '" + text + "'"};
  }
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
  if (errno == ERANGE) throw Failure{kExitValidation, origin + " does not fit in 64 bits"};
  return v;
}

// Output destination shared by every subcommand.
struct Output {
  std::string json_path;
  bool json = false;
  std::string format = "csv";
  std::string path;
  std::string manifest;
};

struct Run {
  std::string subcommand;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> inputs;  // path -> digest
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  bool seeded = false;
};

std::string digest(const std::string& path) {
  char hex[17];
  check(fracest_file_digest(path.c_str(), hex));
  return hex;
}

void write_or_print(const std::string& path, const std::string& text, Run& run) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  check(fracest_write_text(path.c_str(), text.c_str()));
  run.outputs.push_back(path);
}

void write_manifest(const Run& run, const std::string& path) {
  nlohmann::json params = nlohmann::json::object();
  for (const CLI::Option* opt : run.app->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string joined;
    for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
    params[opt->get_name()] = opt->get_expected_min() == 0 && joined.empty() ? "true" : joined;
  }
  nlohmann::json j = nlohmann::json::object();
  j["subcommand"] = run.subcommand;
  j["parameters"] = params;
  j["input_digests"] = run.inputs;
  j["outputs"] = run.outputs;
  // null for subcommands that draw no random numbers
  j["seed"] = run.seeded ? nlohmann::json(run.seed) : nlohmann::json(nullptr);
  j["version"] = fracest_version();
  const std::string text = j.dump(2) + "\n";
  check(fracest_write_text(path.c_str(), text.c_str()));
}

void emit(const fracest_report* report, const Output& out, Run& run) {
  const char* text = nullptr;
  std::string target = out.path;
  bool as_json = out.format == "json";
  if (out.json) {
    as_json = true;
    target = out.json_path;
  }
  check(as_json ? fracest_report_json(report, &text) : fracest_report_csv(report, &text));
  write_or_print(target, text, run);
  if (!out.manifest.empty()) {
    write_manifest(run, out.manifest);
  } else if (!run.outputs.empty()) {
    write_manifest(run, run.outputs.front() + ".manifest.json");
  }
}

std::vector<CLI::Option*> g_json_options;

void add_output(CLI::App* sub, Output& out) {
  g_json_options.push_back(
      sub->add_option("--json", out.json_path, "write the JSON report to PATH, or to stdout without PATH")
          ->expected(0, 1));
  sub->add_option("--format", out.format, "report format when --json is not given")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--output,-o", out.path, "report file (default stdout)");
  sub->add_option("--manifest", out.manifest, "manifest path (default OUTPUT.manifest.json)");
}

std::uint64_t resolve_seed(const std::string& flag, Run& run) {
  if (!flag.empty()) {
    run.seed = parse_seed(flag, "--seed");
  } else if (const char* env = std::getenv("FRACEST_SEED"); env && *env) {
    run.seed = parse_seed(env, "FRACEST_SEED");
  } else {
    run.seed = 1;
  }
  run.seeded = true;
  return run.seed;
}

std::string kv_line(const std::string& key, const std::string& value) { return key + "=" + value + "\n"; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracest: fractional derivatives of reliability functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fracest_version()));

  Run run;
  Output out;
  std::string seed_flag;
  unsigned workers = 1;

  // point
  std::string input;
  double alpha = 0.25, x = 0.5, level = 0.95;
  auto* point = app.add_subcommand("point", "pointwise estimate with a confidence interval");
  point->add_option("--input", input, "one-column sample CSV")->required();
  point->add_option("--alpha", alpha, "order, 0 < alpha < 1/2")->required();
  point->add_option("--x", x, "evaluation point > 0")->required();
  point->add_option("--level", level, "confidence level");
  add_output(point, out);

  // curve
  std::string law;
  std::size_t points = 512;
  double b = 1.0;
  auto* curve = app.add_subcommand("curve", "estimated or numerical derivative curve as two-column CSV");
  auto* curve_in = curve->add_option("--input", input, "one-column sample CSV");
  curve->add_option("--law", law, "closed-form law instead of a sample: uniform, power:D:C, cusp:D:M, indicator:H")
      ->excludes(curve_in);
  curve->add_option("--alpha", alpha, "order")->required();
  curve->add_option("--points", points, "graded intervals");
  curve->add_option("--b", b, "right end of the grid");
  curve->add_option("--output,-o", out.path, "curve CSV (default stdout)");
  curve->add_option("--manifest", out.manifest, "manifest path");

  // loss
  double q = 2.0;
  std::size_t n = 100, reps = 1000;
  std::string kernel = "exact";
  auto* loss = app.add_subcommand("loss", "Monte-Carlo L_q loss W_qn against its bounds");
  loss->add_option("--alpha", alpha, "order")->required();
  loss->add_option("--q", q, "exponent, 1 <= q < 1/alpha")->required();
  loss->add_option("--n", n, "sample size")->required();
  loss->add_option("--reps", reps, "replications");
  loss->add_option("--seed", seed_flag, "64-bit seed (default FRACEST_SEED, then 1)");
  loss->add_option("--workers", workers, "worker threads");
  loss->add_option("--kernel", kernel, "limit covariance kernel")->check(CLI::IsMember({"exact", "closed"}));
  loss->add_option("--law", law, "closed-form law (default uniform)");
  add_output(loss, out);

  // limit
  std::string us = "1";
  auto* limit = app.add_subcommand("limit", "tail probability of the limit process norm");
  limit->add_option("--alpha", alpha, "order")->required();
  limit->add_option("--q", q, "exponent");
  limit->add_option("--u", us, "level or comma-separated levels")->required();
  limit->add_option("--kernel", kernel, "covariance kernel")->check(CLI::IsMember({"exact", "closed"}));
  limit->add_option("--reps", reps, "simulated paths");
  limit->add_option("--points", points, "grid points");
  limit->add_option("--seed", seed_flag, "64-bit seed");
  limit->add_option("--workers", workers, "worker threads");
  add_output(limit, out);

  // spectral
  std::string model = "white", series_in, series_out;
  std::size_t lambda_grid = 32;
  double lambda_max = 3.141592653589793;
  auto* spectral = app.add_subcommand("spectral", "spectral-function derivative, band, bias and variance");
  spectral->add_option("--model", model, "white or ar1:RHO");
  spectral->add_option("--alpha", alpha, "order")->required();
  spectral->add_option("--n", n, "series length");
  spectral->add_option("--reps", reps, "replications for the variance ratio");
  spectral->add_option("--lambda-grid", lambda_grid, "frequencies lambda_max * j / M");
  spectral->add_option("--lambda-max", lambda_max, "largest frequency, <= 2 pi");
  spectral->add_option("--level", level, "band level");
  spectral->add_option("--seed", seed_flag, "64-bit seed");
  spectral->add_option("--workers", workers, "worker threads");
  auto* s_in = spectral->add_option("--series-in", series_in, "estimate from a one-value-per-line series");
  spectral->add_option("--series-out", series_out, "save the simulated series")->excludes(s_in);
  add_output(spectral, out);

  // mixed
  double beta = 0.25, y = 0.5;
  bool field = false;
  std::size_t grid = 16;
  auto* mixed = app.add_subcommand("mixed", "mixed derivative estimate from pairs");
  mixed->add_option("--input", input, "two-column pairs CSV")->required();
  mixed->add_option("--alpha", alpha, "order in x")->required();
  mixed->add_option("--beta", beta, "order in y")->required();
  mixed->add_option("--x", x, "x > 0")->required();
  mixed->add_option("--y", y, "y > 0")->required();
  mixed->add_flag("--field", field, "also tabulate on the grid (k/M, l/M)");
  mixed->add_option("--grid", grid, "M for --field");
  add_output(mixed, out);

  // mc
  std::string experiment, config;
  bool list = false;
  auto* mc = app.add_subcommand("mc", "run a registered experiment");
  mc->add_option("--experiment", experiment, "experiment name");
  mc->add_option("--config", config, "key=value parameter file");
  mc->add_option("--seed", seed_flag, "64-bit seed");
  mc->add_option("--workers", workers, "worker threads");
  mc->add_flag("--list", list, "print experiment names");
  add_output(mc, out);

  auto* selftest = app.add_subcommand("selftest", "closed-form self checks");
  add_output(selftest, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  for (const CLI::Option* opt : g_json_options) out.json = out.json || opt->count() > 0;

  try {
    if (workers == 0) throw Failure{kExitValidation, "--workers must be positive"};
    ReportHandle report;
    if (point->parsed()) {
      run.subcommand = "point";
      run.app = point;
      check(fracest_check_estimation_order(alpha));
      SampleHandle s;
      check(fracest_sample_load(input.c_str(), &s.p));
      run.inputs[input] = digest(input);
      check(fracest_point(s.p, alpha, x, level, &report.p));
      emit(report.p, out, run);
    } else if (curve->parsed()) {
      run.subcommand = "curve";
      run.app = curve;
      CurveHandle c;
      if (!law.empty()) {
        check(fracest_curve_law(law.c_str(), alpha, points, b, &c.p));
      } else if (!input.empty()) {
        SampleHandle s;
        check(fracest_sample_load(input.c_str(), &s.p));
        run.inputs[input] = digest(input);
        check(fracest_curve_estimate(s.p, alpha, points, b, &c.p));
      } else {
        throw Failure{kExitValidation, "curve needs --input or --law"};
      }
      const char* text = nullptr;
      check(fracest_curve_csv(c.p, &text));
      write_or_print(out.path, text, run);
      if (!run.outputs.empty()) {
        write_manifest(run, out.manifest.empty() ? out.path + ".manifest.json" : out.manifest);
      }
    } else if (loss->parsed()) {
      run.subcommand = "loss";
      run.app = loss;
      std::string cfg = kv_line("alpha", fmt(alpha)) + kv_line("q", fmt(q)) + kv_line("n", std::to_string(n)) +
                        kv_line("reps", std::to_string(reps)) + kv_line("kernel", kernel);
      if (!law.empty()) cfg += kv_line("law", law);
      check(fracest_experiment("loss", cfg.c_str(), resolve_seed(seed_flag, run), workers, &report.p));
      emit(report.p, out, run);
    } else if (limit->parsed()) {
      run.subcommand = "limit";
      run.app = limit;
      const std::string cfg = kv_line("alpha", fmt(alpha)) + kv_line("q", fmt(q)) + kv_line("u", us) +
                              kv_line("kernel", kernel) + kv_line("reps", std::to_string(reps)) +
                              kv_line("points", std::to_string(points));
      check(fracest_experiment("limit", cfg.c_str(), resolve_seed(seed_flag, run), workers, &report.p));
      emit(report.p, out, run);
    } else if (spectral->parsed()) {
      run.subcommand = "spectral";
      run.app = spectral;
      if (!series_in.empty()) {
        VectorHandle v;
        check(fracest_series_load(series_in.c_str(), &v.p));
        run.inputs[series_in] = digest(series_in);
        check(fracest_spectral_estimate(v.p, alpha, lambda_grid, lambda_max, &report.p));
      } else {
        const std::uint64_t seed = resolve_seed(seed_flag, run);
        if (!series_out.empty()) {
          VectorHandle v;
          check(fracest_series_generate(model.c_str(), n, seed, &v.p));
          check(fracest_series_save(v.p, series_out.c_str()));
          run.outputs.push_back(series_out);
        }
        const std::string cfg = kv_line("model", model) + kv_line("alpha", fmt(alpha)) +
                                kv_line("n", std::to_string(n)) + kv_line("reps", std::to_string(reps)) +
                                kv_line("grid", std::to_string(lambda_grid)) + kv_line("level", fmt(level)) +
                                kv_line("lambda_max", fmt(lambda_max));
        check(fracest_experiment("spectral", cfg.c_str(), seed, workers, &report.p));
      }
      emit(report.p, out, run);
    } else if (mixed->parsed()) {
      run.subcommand = "mixed";
      run.app = mixed;
      check(fracest_check_estimation_order(alpha));
      check(fracest_check_estimation_order(beta));
      SampleHandle s;
      check(fracest_sample_load(input.c_str(), &s.p));
      run.inputs[input] = digest(input);
      check(fracest_mixed(s.p, alpha, beta, x, y, field ? grid : 0, &report.p));
      emit(report.p, out, run);
    } else if (mc->parsed()) {
      run.subcommand = "mc";
      run.app = mc;
      if (list) {
        std::fputs(fracest_experiment_names(), stdout);
        return 0;
      }
      if (experiment.empty()) throw Failure{kExitValidation, "mc needs --experiment NAME (see --list)"};
      std::string cfg;
      if (!config.empty()) {
        char* text = nullptr;
        check(fracest_read_text(config.c_str(), &text));
        cfg = text;
        fracest_string_free(text);
        run.inputs[config] = digest(config);
      }
      check(fracest_experiment(experiment.c_str(), cfg.c_str(), resolve_seed(seed_flag, run), workers, &report.p));
      emit(report.p, out, run);
    } else if (selftest->parsed()) {
      run.subcommand = "selftest";
      run.app = selftest;
      check(fracest_selftest(&report.p));
      emit(report.p, out, run);
      double failed = 0.0;
      check(fracest_report_scalar(report.p, "failed", &failed));
      if (failed > 0.0) {
        std::cerr << "selftest: " << failed << " case(s) failed\n";
        return kExitNumerical;
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
