#include "fracest/fracest.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <variant>

#include "fracest/error.hpp"
#include "fracest/estimator.hpp"
#include "fracest/experiments.hpp"
#include "fracest/io.hpp"
#include "fracest/laws.hpp"
#include "fracest/multivariate.hpp"
#include "fracest/selftest.hpp"
#include "fracest/spectral.hpp"

#ifndef FRACEST_VERSION
#define FRACEST_VERSION "0.0.0"
#endif

struct fracest_sample {
  std::variant<fracest::Sample, fracest::Sample2D> data;
};

struct fracest_report {
  fracest::McReport report;
  std::string json;
  std::string csv;
};

struct fracest_curve {
  fracest::GridFunction f;
  double alpha;
  std::string csv;
};

struct fracest_vector {
  std::vector<double> values;
};

namespace {

thread_local std::string g_last_error;

template <class F>
fracest_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return FRACEST_OK;
  } catch (const fracest::RegimeError& e) {
    g_last_error = e.what();
    return FRACEST_E_REGIME;
  } catch (const fracest::InvalidInput& e) {
    g_last_error = e.what();
    return FRACEST_E_INVALID;
  } catch (const fracest::IoError& e) {
    g_last_error = e.what();
    return FRACEST_E_IO;
  } catch (const fracest::NumericalError& e) {
    g_last_error = e.what();
    return FRACEST_E_NUMERICAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FRACEST_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FRACEST_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw fracest::InvalidInput(std::string(what) + " is null");
}

fracest_report* wrap(fracest::McReport r) {
  auto* out = new fracest_report{std::move(r), {}, {}};
  return out;
}

const fracest::Sample& one_column(const fracest_sample* s) {
  need(s, "sample");
  if (!std::holds_alternative<fracest::Sample>(s->data)) throw fracest::InvalidInput("expected a one-column sample");
  return std::get<fracest::Sample>(s->data);
}

const fracest::Sample2D& two_columns(const fracest_sample* s) {
  need(s, "sample");
  if (!std::holds_alternative<fracest::Sample2D>(s->data)) throw fracest::InvalidInput("expected a two-column sample");
  return std::get<fracest::Sample2D>(s->data);
}

}  // namespace

extern "C" {

const char* fracest_version(void) { return FRACEST_VERSION; }

const char* fracest_last_error(void) { return g_last_error.c_str(); }

fracest_status fracest_check_estimation_order(double alpha) {
  return guarded([&] {
    if (!fracest::FractionalOrder(alpha).estimation_regime()) {
      std::ostringstream msg;
      msg << "alpha = " << alpha << " is outside the estimation regime alpha < 1/2";
      throw fracest::RegimeError(msg.str());
    }
  });
}

fracest_status fracest_sample_load(const char* path, fracest_sample** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new fracest_sample{fracest::ingest_sample(path)};
  });
}

fracest_status fracest_sample_from_values(const double* values, size_t n, fracest_sample** out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) need(values, "values");
    *out = new fracest_sample{fracest::Sample(std::vector<double>(values, values + n))};
  });
}

fracest_status fracest_sample_from_pairs(const double* xs, const double* ys, size_t n, fracest_sample** out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) {
      need(xs, "xs");
      need(ys, "ys");
    }
    std::vector<std::pair<double, double>> pairs;
    for (size_t i = 0; i < n; ++i) pairs.emplace_back(xs[i], ys[i]);
    *out = new fracest_sample{fracest::Sample2D(std::move(pairs))};
  });
}

fracest_status fracest_sample_shape(const fracest_sample* s, size_t* n, int* columns) {
  return guarded([&] {
    need(s, "sample");
    const bool one = std::holds_alternative<fracest::Sample>(s->data);
    if (n) *n = one ? std::get<fracest::Sample>(s->data).size() : std::get<fracest::Sample2D>(s->data).size();
    if (columns) *columns = one ? 1 : 2;
  });
}

void fracest_sample_free(fracest_sample* s) { delete s; }

fracest_status fracest_point(const fracest_sample* s, double alpha, double x, double level, fracest_report** out) {
  return guarded([&] {
    need(out, "out");
    const auto& sample = one_column(s);
    const fracest::FractionalOrder order(alpha);
    const auto est = fracest::confidence_interval(sample, x, order, level);
    fracest::McReport r;
    r.experiment = "point";
    r.scalars["estimate"] = est.value;
    r.scalars["stderr"] = est.stderr;
    r.scalars["variance"] = est.variance;
    r.scalars["n"] = static_cast<double>(sample.size());
    r.scalars["alpha"] = alpha;
    r.scalars["x"] = x;
    r.scalars["level"] = est.level;
    r.series["ci"] = {est.ci_low, est.ci_high};
    r.flags["variance_clamped"] = est.variance_clamped;
    *out = wrap(std::move(r));
  });
}

fracest_status fracest_mixed(const fracest_sample* s, double alpha, double beta, double x, double y, size_t grid,
                             fracest_report** out) {
  return guarded([&] {
    need(out, "out");
    const auto& sample = two_columns(s);
    const fracest::MixedOrder order(alpha, beta);
    fracest::McReport r;
    r.experiment = "mixed";
    r.scalars["estimate"] = fracest::estimate_mixed(sample, x, y, order);
    r.scalars["n"] = static_cast<double>(sample.size());
    r.scalars["alpha"] = alpha;
    r.scalars["beta"] = beta;
    r.scalars["x"] = x;
    r.scalars["y"] = y;
    r.strings["regime"] = fracest::regime_name(order.regime());
    if (grid > 0) {
      auto& xs = r.series["xs"];
      for (size_t k = 1; k <= grid; ++k) xs.push_back(static_cast<double>(k) / static_cast<double>(grid));
      r.series["ys"] = xs;
      auto& field = r.series["field"];
      for (double u : xs) {
        for (double v : xs) field.push_back(fracest::estimate_mixed(sample, u, v, order));
      }
    }
    *out = wrap(std::move(r));
  });
}

fracest_status fracest_experiment(const char* name, const char* config, uint64_t seed, unsigned workers,
                                  fracest_report** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto params = config ? fracest::parse_kv(config) : fracest::Params{};
    *out = wrap(fracest::run_experiment(name, params, seed, workers));
  });
}

const char* fracest_experiment_names(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& n : fracest::experiment_names()) s += n + "\n";
    return s;
  }();
  return names.c_str();
}

fracest_status fracest_selftest(fracest_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = wrap(fracest::selftest_report());
  });
}

fracest_status fracest_series_generate(const char* model, size_t n, uint64_t seed, fracest_vector** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    auto series = fracest::generate_series(fracest::SpectralModel::parse(model), n, seed);
    *out = new fracest_vector{std::move(series.values)};
  });
}

fracest_status fracest_series_load(const char* path, fracest_vector** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::istringstream in(fracest::read_text_file(path));
    std::string line;
    std::size_t no = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
      ++no;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      char* end = nullptr;
      const double v = std::strtod(line.c_str() + b, &end);
      while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
      if (end == line.c_str() + b || *end != '\0' || !std::isfinite(v)) {
        throw fracest::InvalidInput(std::string(path) + ": line " + std::to_string(no) + ": not a finite number");
      }
      values.push_back(v);
    }
    if (values.size() < 2) throw fracest::InvalidInput(std::string(path) + ": series needs at least two values");
    *out = new fracest_vector{std::move(values)};
  });
}

fracest_status fracest_series_save(const fracest_vector* v, const char* path) {
  return guarded([&] {
    need(v, "series");
    need(path, "path");
    std::string text;
    for (double x : v->values) text += fracest::format_double(x) + "\n";
    fracest::write_text_file(path, text);
  });
}

fracest_status fracest_spectral_estimate(const fracest_vector* series, double alpha, size_t points, double lambda_max,
                                         fracest_report** out) {
  return guarded([&] {
    need(series, "series");
    need(out, "out");
    const fracest::FractionalOrder order(alpha);
    const auto grid = fracest::default_lambda_grid(points, lambda_max);
    const auto est = fracest::estimate_spectral_frac_derivative(series->values, order, grid);
    fracest::McReport r;
    r.experiment = "spectral-estimate";
    r.scalars["alpha"] = alpha;
    r.scalars["n"] = static_cast<double>(series->values.size());
    r.series["lambda"] = grid;
    r.series["estimate_curve"] = est.values;
    *out = wrap(std::move(r));
  });
}

size_t fracest_vector_size(const fracest_vector* v) { return v ? v->values.size() : 0; }

const double* fracest_vector_data(const fracest_vector* v) { return v ? v->values.data() : nullptr; }

void fracest_vector_free(fracest_vector* v) { delete v; }

fracest_status fracest_report_json(const fracest_report* r, const char** text) {
  return guarded([&] {
    need(r, "report");
    need(text, "text");
    auto* mut = const_cast<fracest_report*>(r);
    if (mut->json.empty()) mut->json = fracest::report_json(r->report);
    *text = mut->json.c_str();
  });
}

fracest_status fracest_report_csv(const fracest_report* r, const char** text) {
  return guarded([&] {
    need(r, "report");
    need(text, "text");
    auto* mut = const_cast<fracest_report*>(r);
    if (mut->csv.empty()) mut->csv = fracest::report_csv(r->report);
    *text = mut->csv.c_str();
  });
}

fracest_status fracest_report_scalar(const fracest_report* r, const char* key, double* value) {
  return guarded([&] {
    need(r, "report");
    need(key, "key");
    need(value, "value");
    const auto it = r->report.scalars.find(key);
    if (it == r->report.scalars.end()) throw fracest::InvalidInput(std::string("no scalar '") + key + "'");
    *value = it->second;
  });
}

fracest_status fracest_report_flag(const fracest_report* r, const char* key, int* value) {
  return guarded([&] {
    need(r, "report");
    need(key, "key");
    need(value, "value");
    const auto it = r->report.flags.find(key);
    if (it == r->report.flags.end()) throw fracest::InvalidInput(std::string("no flag '") + key + "'");
    *value = it->second ? 1 : 0;
  });
}

void fracest_report_free(fracest_report* r) { delete r; }

fracest_status fracest_curve_estimate(const fracest_sample* s, double alpha, size_t points, double b,
                                      fracest_curve** out) {
  return guarded([&] {
    need(out, "out");
    const auto& sample = one_column(s);
    const fracest::FractionalOrder order(alpha);
    if (!(b > 0.0)) throw fracest::InvalidInput("curve end must be positive");
    if (points < 1) throw fracest::InvalidInput("curve needs at least one interval");
    const double r = fracest::default_grading(order);
    const auto nodes = fracest::graded_nodes(b, points, r);
    // The value at 0 is undefined and set to 0.
    auto f = fracest::tabulate(
        nodes, [&](double x) { return x > 0.0 ? fracest::estimate_point(sample, x, order) : 0.0; },
        {fracest::Grading::Kind::Graded, r});
    *out = new fracest_curve{std::move(f), alpha, {}};
  });
}

fracest_status fracest_curve_law(const char* law, double alpha, size_t points, double b, fracest_curve** out) {
  return guarded([&] {
    need(law, "law");
    need(out, "out");
    const auto cf = fracest::ClosedForm::parse(law);
    const fracest::FractionalOrder order(alpha);
    if (!(b > 0.0)) throw fracest::InvalidInput("curve end must be positive");
    if (points < 1) throw fracest::InvalidInput("curve needs at least one interval");
    const double r = fracest::default_grading(order);
    const auto g = fracest::tabulate(fracest::graded_nodes(b, points, r), [&](double x) { return cf.reliability(x); },
                                     {fracest::Grading::Kind::Graded, r});
    *out = new fracest_curve{fracest::frac_derivative(g, order, fracest::Monotonicity::Any), alpha, {}};
  });
}

fracest_status fracest_curve_load(const char* path, fracest_curve** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    double alpha = 0.0;
    auto f = fracest::grid_from_csv(fracest::read_text_file(path), &alpha);
    *out = new fracest_curve{std::move(f), alpha, {}};
  });
}

fracest_status fracest_curve_csv(const fracest_curve* c, const char** text) {
  return guarded([&] {
    need(c, "curve");
    need(text, "text");
    auto* mut = const_cast<fracest_curve*>(c);
    if (mut->csv.empty()) mut->csv = fracest::to_csv(c->f, c->alpha);
    *text = mut->csv.c_str();
  });
}

size_t fracest_curve_size(const fracest_curve* c) { return c ? c->f.size() : 0; }

const double* fracest_curve_nodes(const fracest_curve* c) { return c ? c->f.nodes().data() : nullptr; }

const double* fracest_curve_values(const fracest_curve* c) { return c ? c->f.values().data() : nullptr; }

void fracest_curve_free(fracest_curve* c) { delete c; }

fracest_status fracest_file_digest(const char* path, char* hex) {
  return guarded([&] {
    need(path, "path");
    need(hex, "hex");
    const std::string d = fracest::hex64(fracest::fnv1a64(fracest::read_text_file(path)));
    std::memcpy(hex, d.c_str(), d.size() + 1);
  });
}

fracest_status fracest_write_text(const char* path, const char* text) {
  return guarded([&] {
    need(path, "path");
    need(text, "text");
    fracest::write_text_file(path, text);
  });
}

fracest_status fracest_read_text(const char* path, char** text) {
  return guarded([&] {
    need(path, "path");
    need(text, "text");
    const std::string s = fracest::read_text_file(path);
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *text = buf;
  });
}

void fracest_string_free(char* text) { std::free(text); }

}  // extern "C"
