#include "csd/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace csd {

namespace {

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("expected numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

std::string string_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(std::string("expected string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || errno == ERANGE) {
    throw InputError("line " + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

}  // namespace

GeneratorSpec generator_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("generator spec must be a JSON object");
  GeneratorSpec g;
  try {
    g.family = family_from_string(string_field(j, "family"));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (g.family != Family::Independence) g.theta = number_field(j, "theta");
  try {
    g.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return g;
}

Json to_json(const GeneratorSpec& g) {
  Json j{{"family", to_string(g.family)}};
  if (g.family != Family::Independence) j["theta"] = g.theta;
  return j;
}

CopulaModel model_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("model spec must be a JSON object");
  const std::string type = string_field(j, "type");
  try {
    if (type == "archimedean") {
      return CopulaModel::archimedean(generator_from_json(j), static_cast<int>(number_field(j, "d")));
    }
    if (type == "independence") {
      return CopulaModel::independence(static_cast<int>(number_field(j, "d")));
    }
    if (type == "gaussian") {
      if (!j.contains("sigma") || !j["sigma"].is_array()) throw ConfigError("gaussian model needs a 'sigma' matrix");
      const auto& rows = j["sigma"];
      const auto d = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd sigma(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
          throw ConfigError("gaussian 'sigma' must be square");
        }
        for (Eigen::Index c = 0; c < d; ++c) sigma(r, c) = row[static_cast<std::size_t>(c)].get<double>();
      }
      return CopulaModel::gaussian(sigma);
    }
    if (type == "mixture") {
      if (!j.contains("weights") || !j.contains("components")) {
        throw ConfigError("mixture model needs 'weights' and 'components'");
      }
      std::vector<double> w = j["weights"].get<std::vector<double>>();
      std::vector<CopulaModel> comps;
      for (const auto& c : j["components"]) comps.push_back(model_from_json(c));
      return CopulaModel::mixture(std::move(w), std::move(comps));
    }
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown model type '" + type + "'");
}

Json to_json(const CopulaModel& model) {
  const auto& v = model.variant();
  if (const auto* a = std::get_if<ArchimedeanModel>(&v)) {
    if (a->generator.family == Family::Independence) return Json{{"type", "independence"}, {"d", a->dim}};
    Json j = to_json(a->generator);
    j["type"] = "archimedean";
    j["d"] = a->dim;
    return j;
  }
  if (const auto* g = std::get_if<GaussianModel>(&v)) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < g->sigma.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < g->sigma.cols(); ++c) row.push_back(g->sigma(r, c));
      rows.push_back(row);
    }
    return Json{{"type", "gaussian"}, {"sigma", rows}};
  }
  const auto& m = std::get<MixtureModel>(v);
  Json comps = Json::array();
  for (const auto& c : m.components) comps.push_back(to_json(c));
  return Json{{"type", "mixture"}, {"weights", m.weights}, {"components", comps}};
}

BaseKernelSpec KernelChoice::resolve(const PointMatrix& sample) const {
  BaseKernelSpec spec{kind, median ? median_bandwidth(sample) : bandwidth};
  spec.validate();
  return spec;
}

namespace {

BaseKernelKind parse_kind(const std::string& name) {
  try {
    return kernel_kind_from_string(name);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

KernelChoice kernel_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("kernel spec must be a JSON object");
  std::string kind = "weighted_rbf";
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) throw ConfigError("kernel kind must be a string");
    kind = j["kind"].get<std::string>();
  }
  if (!j.contains("bandwidth")) return kernel_from_flag("median", kind);
  const auto& bw = j["bandwidth"];
  if (bw.is_string()) return kernel_from_flag(bw.get<std::string>(), kind);
  if (!bw.is_number()) throw ConfigError("kernel bandwidth must be a number or \"median\"");
  const double value = bw.get<double>();
  if (!(std::isfinite(value) && value > 0.0)) throw ConfigError("bandwidth must be positive");
  return KernelChoice{parse_kind(kind), false, value};
}

KernelChoice kernel_from_flag(const std::string& bandwidth, const std::string& kind) {
  const BaseKernelKind k = parse_kind(kind);
  if (bandwidth == "median") return KernelChoice{k, true, 0.0};
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(bandwidth, &used);
    if (used != bandwidth.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("bandwidth must be a positive number or 'median', got '" + bandwidth + "'");
  }
  if (!(std::isfinite(value) && value > 0.0)) throw ConfigError("bandwidth must be positive");
  return KernelChoice{k, false, value};
}

Json to_json(const CsdEstimate& e) {
  Json j{{"csd_sq", e.csd_sq}, {"n", e.n}, {"method", to_string(e.method)}, {"diag_mean", e.diag_mean}};
  j["seed"] = e.seed ? Json(*e.seed) : Json(nullptr);
  return j;
}

Json to_json(const TestReport& r) {
  std::vector<double> sorted = r.bootstrap_stats;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    if (sorted.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()))) ;
    return sorted[std::min(sorted.size() - 1, k == 0 ? 0 : k - 1)];
  };
  double mean = 0.0;
  for (double t : sorted) mean += t;
  if (!sorted.empty()) mean /= static_cast<double>(sorted.size());
  return Json{{"estimate", to_json(r.estimate)},
              {"bootstrap",
               {{"replicates", r.bootstrap_stats.size()},
                {"seed", r.bootstrap_seed},
                {"mean", mean},
                {"q50", quantile(0.5)},
                {"q95", quantile(0.95)},
                {"critical_value", quantile(1.0 - r.alpha)},
                {"gram_streamed", r.gram_streamed}}},
              {"p_value", r.p_value},
              {"alpha", r.alpha},
              {"reject", r.reject},
              {"timing_ms", r.timing_ms}};
}

PointMatrix read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_commas(line);
      break;
    }
  }
  if (header.empty()) throw InputError("CSV input is empty");
  const std::size_t d = header.size();
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != d) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(d) + " columns, got " +
                       std::to_string(cells.size()));
    }
    for (const auto& c : cells) data.push_back(parse_double(c, line_no));
    ++rows;
  }
  if (rows == 0) throw InputError("CSV input has a header but no data rows");
  return PointMatrix(rows, d, std::move(data));
}

PointMatrix read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const PointMatrix& points, const std::string& prefix) {
  for (std::size_t j = 0; j < points.cols(); ++j) out << (j ? "," : "") << prefix << (j + 1);
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t j = 0; j < points.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", points(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const PointMatrix& points, const std::string& prefix) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  write_csv(out, points, prefix);
}

Json load_json_arg(const std::string& text_or_path) {
  const std::string t = trim(text_or_path);
  try {
    if (!t.empty() && (t.front() == '{' || t.front() == '[')) return Json::parse(t);
    std::ifstream in(t);
    if (!in) throw ConfigError("'" + t + "' is neither JSON nor a readable file");
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace csd
