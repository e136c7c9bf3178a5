// Acceptance driver: one PASS/FAIL line per criterion, plus labelled
// diagnostic lines. Usage: acceptance [--cli PATH] [--seed S] [ID...]
// where ID is 1..14 or a diagnostic id (10-bias, 10-limit, 13-exact).
// Exit status is 0 iff every requested line passed.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fracest/experiments.hpp"
#include "fracest/io.hpp"
#include "fracest/mc.hpp"

using namespace fracest;

namespace {

struct Line {
  bool pass = false;
  std::string detail;
};

std::uint64_t g_seed = 1;
std::string g_cli;
std::map<std::string, std::pair<McReport, double>> g_cache;

// Runs an experiment once per process and remembers the wall time.
const McReport& run(const std::string& name, double* seconds = nullptr) {
  auto it = g_cache.find(name);
  if (it == g_cache.end()) {
    const auto t0 = std::chrono::steady_clock::now();
    McReport r = run_experiment(name, {}, g_seed, 1);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    it = g_cache.emplace(name, std::make_pair(std::move(r), dt)).first;
  }
  if (seconds) *seconds = it->second.second;
  return it->second.first;
}

double scalar(const McReport& r, const std::string& k) { return r.scalars.at(k); }
bool flag(const McReport& r, const std::string& k) { return r.flags.at(k); }
const std::vector<double>& series(const McReport& r, const std::string& k) { return r.series.at(k); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v, int prec = 4) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], prec);
  return s + "]";
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string timing(double seconds, double limit) {
  return "runtime " + fmt(seconds, 3) + " s (limit " + fmt(limit, 3) + " s)";
}

Line c1() {
  double t = 0.0;
  const auto& r = run("abel-inversion", &t);
  const double err = scalar(r, "sup_error");
  return {err <= 1e-3 && t < 5.0, "sup_error " + fmt(err) + " <= 1e-3 on 4096 nodes; " + timing(t, 5)};
}

Line c2() {
  double t = 0.0;
  const auto& r = run("unbiasedness", &t);
  const double z = max_abs(series(r, "z"));
  return {z <= 3.0 && t < 120.0, "max |mean - truth| / SE = " + fmt(z) + " over 9 cells; " + timing(t, 120)};
}

Line c3() {
  const auto& r = run("unbiasedness");
  const double e = max_abs(series(r, "var_rel_error"));
  return {e <= 0.05, "max |n Var / target - 1| = " + fmt(e) + " <= 0.05"};
}

Line c4() {
  const auto& r = run("unbiasedness");
  const auto& p = series(r, "ks_p");
  const auto& a = series(r, "alpha");
  bool ok = true;
  std::string failing;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.01)) {
      ok = false;
      failing += " alpha=" + fmt(a[i]) + ",x=" + fmt(series(r, "x")[i]) + ",p=" + fmt(p[i], 3);
    }
  }
  return {ok, "KS p-values " + list(p, 3) + (ok ? "" : "; rejected:" + failing)};
}

Line c5() {
  const auto& r = run("deterministic-bound");
  return {scalar(r, "violations") == 0.0,
          "violations " + fmt(scalar(r, "violations")) + ", max norm / K = " + fmt(scalar(r, "max_ratio"))};
}

Line c6() {
  double t = 0.0;
  const auto& r = run("rosenthal-chain", &t);
  return {scalar(r, "violations") == 0.0 && t < 300.0,
          "violations " + fmt(scalar(r, "violations")) + " over " + fmt(static_cast<double>(series(r, "n").size())) +
              " (alpha, q, n) cells; " + timing(t, 300)};
}

Line c7() {
  const auto& r = run("regime-dichotomy");
  return {flag(r, "pass"), "pole slopes " + list(series(r, "pole_slope")) +
                               " vs -1 within 10%; divergent above 1/alpha " + list(series(r, "diverging_zeta"))};
}

Line c8() {
  const auto& r = run("kernel-covariance");
  return {flag(r, "pass"), "max |z| vs exact kernel " + fmt(scalar(r, "max_abs_z_exact")) +
                               " over 15 pairs; diagonal equals the closed-form variance"};
}

Line c9() {
  double t = 0.0;
  const auto& r = run("tail-slope", &t);
  const auto& got = series(r, "fitted_slope");
  const auto& want = series(r, "expected_slope");
  bool ok = t < 120.0;
  for (std::size_t i = 0; i < got.size(); ++i) ok = ok && std::abs(got[i] - want[i]) <= 0.3;
  return {ok, "slopes " + list(got) + " vs " + list(want) + " +/- 0.3; " + timing(t, 120)};
}

Line c10_bias() {
  const auto& r = run("spectral-bias");
  const double s = scalar(r, "bias_slope");
  return {std::abs(s + 1.0) <= 0.4, "log-log bias slope " + fmt(s) + " (" + r.strings.at("model") +
                                        "); white-noise max |bias| " + fmt(scalar(r, "white_noise_max_abs_bias"), 3)};
}

Line c10_variance_nominal() {
  double t = 0.0;
  const auto& r = run("spectral-variance", &t);
  const double ratio = scalar(r, "var_ratio");
  return {std::abs(ratio - 1.0) <= 0.1 && t < 600.0,
          "n Var / Theta(pi, pi) = " + fmt(scalar(r, "n_var")) + " / " + fmt(scalar(r, "theta_nominal")) + " = " +
              fmt(ratio) + "; " + timing(t, 600)};
}

Line c10() {
  const Line b = c10_bias();
  const Line v = c10_variance_nominal();
  return {b.pass && v.pass, "bias: " + b.detail + "; variance: " + v.detail};
}

Line c10_limit() {
  const auto& r = run("spectral-variance");
  const double ratio = scalar(r, "var_ratio_limit");
  return {std::abs(ratio - 1.0) <= 0.1,
          "n Var / limit kernel = " + fmt(scalar(r, "n_var")) + " / " + fmt(scalar(r, "theta_limit")) + " = " +
              fmt(ratio)};
}

Line c11() {
  const auto& r = run("band-coverage");
  const double c = scalar(r, "coverage");
  return {std::abs(c - 0.95) <= 0.03, "coverage " + fmt(c) + " vs 0.95 +/- 0.03 over " + fmt(r.reps) + " reps"};
}

Line c12() {
  const auto& m = run("mixed-unbiasedness");
  const auto& f = run("field-moment");
  const double z = max_abs(series(m, "z"));
  const auto& got = series(f, "pole_order");
  const auto& want = series(f, "expected_order");
  bool ok = z <= 3.0;
  for (std::size_t i = 0; i < got.size(); ++i) ok = ok && std::abs(got[i] - want[i]) <= 0.4;
  return {ok, "max |z| " + fmt(z) + " over independent and comonotone cells; pole orders " + list(got) + " vs " +
                  list(want) + " +/- 0.4"};
}

Line c13() {
  const auto& r = run("kiefer");
  return {scalar(r, "violations") == 0.0, "exceedance " + list(series(r, "exceedance")) + " vs bound " +
                                               list(series(r, "bound"), 6) + "; violations " +
                                               fmt(scalar(r, "violations"))};
}

Line c13_exact() {
  const auto& r = run("kiefer");
  return {flag(r, "exact_below_bound") && flag(r, "no_significant_violation"),
          "exact finite-n exceedance " + list(series(r, "exact_exceedance"), 6) + "; MC z vs bound " +
              list(series(r, "z_vs_bound"), 3)};
}

std::string capture(const std::string& cmd, int* status) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  *status = pclose(pipe.release());
  return out;
}

Line c14() {
  if (g_cli.empty()) return {false, "needs --cli PATH"};
  const std::vector<std::string> names = {
      "abel-inversion", "unbiasedness",   "deterministic-bound", "rosenthal-chain",   "regime-dichotomy",
      "kernel-covariance", "tail-slope",  "spectral-bias",       "spectral-variance", "band-coverage",
      "mixed-unbiasedness", "field-moment", "kiefer"};
  std::size_t identical = 0;
  std::string bad;
  for (const auto& name : names) {
    const std::string base = "'" + g_cli + "' mc --experiment " + name + " --seed " + std::to_string(g_seed) + " --json";
    int s1 = 0, s2 = 0, s3 = 0;
    const std::string a = capture(base, &s1);
    const std::string b = capture(base, &s2);
    const std::string c = capture(base + " --workers 3", &s3);
    if (s1 == 0 && s2 == 0 && s3 == 0 && !a.empty() && a == b && a == c) {
      ++identical;
    } else {
      bad += " " + name;
    }
  }
  return {identical == names.size(), fmt(static_cast<double>(identical)) + "/" +
                                         fmt(static_cast<double>(names.size())) +
                                         " invocations byte-identical across two runs and 1 vs 3 workers" +
                                         (bad.empty() ? "" : "; differing:" + bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Line()>>> checks = {
      {"1", c1},   {"2", c2},   {"3", c3},   {"4", c4},       {"5", c5},   {"6", c6},
      {"7", c7},   {"8", c8},   {"9", c9},   {"10", c10},     {"10-bias", c10_bias},
      {"10-limit", c10_limit},  {"11", c11}, {"12", c12},     {"13", c13}, {"13-exact", c13_exact},
      {"14", c14}};
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else if (a == "--seed" && i + 1 < argc) {
      g_seed = std::stoull(argv[++i]);
    } else {
      wanted.push_back(a);
    }
  }
  bool all = true;
  for (const auto& [id, fn] : checks) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    const bool diagnostic = id.find('-') != std::string::npos;
    Line line;
    try {
      line = fn();
    } catch (const std::exception& e) {
      line = {false, std::string("error: ") + e.what()};
    }
    std::cout << (diagnostic ? "diagnostic " : "criterion ") << id << ": " << (line.pass ? "PASS" : "FAIL") << "  "
              << line.detail << std::endl;
    all = all && line.pass;
  }
  return all ? 0 : 1;
}
