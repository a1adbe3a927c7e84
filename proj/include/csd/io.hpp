#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "csd/base_kernel.hpp"
#include "csd/copula_model.hpp"
#include "csd/estimator.hpp"
#include "csd/generators.hpp"
#include "csd/random_features.hpp"

namespace csd {

using Json = nlohmann::json;

/// {"family":"clayton","theta":2.0}
GeneratorSpec generator_from_json(const Json& j);
Json to_json(const GeneratorSpec& g);

/// {"type":"archimedean","family":"gumbel","theta":1.7,"d":3}
/// {"type":"gaussian","sigma":[[1,0.5],[0.5,1]]}
/// {"type":"mixture","weights":[...],"components":[...]}
/// {"type":"independence","d":2}
CopulaModel model_from_json(const Json& j);
Json to_json(const CopulaModel& model);

/// Bandwidth is either a number or the string "median".
struct KernelChoice {
  BaseKernelKind kind = BaseKernelKind::WeightedRBF;
  bool median = true;
  double bandwidth = 0.0;

  /// Fixed bandwidth, or the median heuristic on `sample`.
  BaseKernelSpec resolve(const PointMatrix& sample) const;
};
/// {"kind":"rbf","bandwidth":0.4} or {"kind":"weighted_rbf","bandwidth":"median"};
/// kind defaults to weighted_rbf.
KernelChoice kernel_from_json(const Json& j);
/// Parses "median" or a positive number; `kind` is "rbf" or "weighted_rbf".
KernelChoice kernel_from_flag(const std::string& bandwidth, const std::string& kind = "weighted_rbf");

Json to_json(const CsdEstimate& e);
/// Bootstrap statistics are summarized; the full vector goes to CSV on request.
Json to_json(const TestReport& r);

/// Reads a CSV with a header row; every other row must have one number per column.
/// Throws InputError on malformed or empty input.
PointMatrix read_csv(std::istream& in);
PointMatrix read_csv_file(const std::string& path);
/// Header u1..ud, values printed with 17 significant digits.
void write_csv(std::ostream& out, const PointMatrix& points, const std::string& prefix = "u");
void write_csv_file(const std::string& path, const PointMatrix& points, const std::string& prefix = "u");

/// A JSON literal, or the path of a file holding one.
Json load_json_arg(const std::string& text_or_path);

}  // namespace csd
