#include "fracest/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fracest/error.hpp"

namespace fracest {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  if (t.empty()) throw InvalidInput("line " + std::to_string(line) + ": empty field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw InvalidInput("line " + std::to_string(line) + ": '" + t + "' is not a number");
  }
  if (!std::isfinite(v)) throw InvalidInput("line " + std::to_string(line) + ": non-finite value");
  if (v < 0.0) throw InvalidInput("line " + std::to_string(line) + ": negative value " + t);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void dump(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

std::string dump_line(const json& j) {
  std::string out;
  dump(j, out);
  out += '\n';
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed on '" + path + "'");
}

std::variant<Sample, Sample2D> parse_sample_text(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  std::size_t columns = 0;
  std::vector<double> single;
  std::vector<std::pair<double, double>> pairs;
  while (std::getline(in, raw)) {
    ++line;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t, ',');
    if (columns == 0) {
      if (fields.size() > 2) throw InvalidInput("line " + std::to_string(line) + ": expected 1 or 2 columns");
      columns = fields.size();
    } else if (fields.size() != columns) {
      throw InvalidInput("line " + std::to_string(line) + ": expected " + std::to_string(columns) + " columns, got " +
                         std::to_string(fields.size()));
    }
    if (columns == 1) {
      single.push_back(parse_number(fields[0], line));
    } else {
      pairs.emplace_back(parse_number(fields[0], line), parse_number(fields[1], line));
    }
  }
  if (columns == 0) throw InvalidInput("sample file has no data lines");
  if (columns == 1) return Sample(std::move(single));
  return Sample2D(std::move(pairs));
}

std::variant<Sample, Sample2D> ingest_sample(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_sample_text(text);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(line) + ": missing '='");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InvalidInput("config line " + std::to_string(line) + ": empty key");
    if (!out.emplace(key, trim(t.substr(eq + 1))).second) {
      throw InvalidInput("config line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string report_json(const McReport& report) {
  json j = json::object();
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  j["reps"] = report.reps;
  for (const auto& [k, v] : report.scalars) j[k] = v;
  for (const auto& [k, v] : report.series) j[k] = v;
  for (const auto& [k, v] : report.strings) j[k] = v;
  for (const auto& [k, v] : report.flags) j[k] = v;
  return dump_line(j);
}

std::string report_csv(const McReport& report) {
  std::map<std::string, std::string> rows;
  rows["experiment"] = report.experiment;
  rows["seed"] = std::to_string(report.seed);
  rows["reps"] = std::to_string(report.reps);
  for (const auto& [k, v] : report.scalars) rows[k] = format_double(v);
  for (const auto& [k, v] : report.series) {
    for (std::size_t i = 0; i < v.size(); ++i) rows[k + "[" + std::to_string(i) + "]"] = format_double(v[i]);
  }
  for (const auto& [k, v] : report.strings) rows[k] = v;
  for (const auto& [k, v] : report.flags) rows[k] = v ? "1" : "0";
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace fracest
