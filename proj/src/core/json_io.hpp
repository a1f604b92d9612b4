#pragma once

#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/experiments.hpp"
#include "core/reduction.hpp"
#include "core/resonance.hpp"
#include "core/spectrum.hpp"

namespace magweyl {

using Json = nlohmann::json;

// Non-finite numbers become null (JSON has no infinity).
Json number_or_null(double v);
Json to_json(const Vec& v);
Json to_json(const Mat& m);  // row-major nested arrays
Json groups_to_json(const Groups& g);  // 1-based indices

Json to_json(const ResonanceRelation& r);
Json to_json(const ConditionReport& r);
Json to_json(const IntegralResult& r);
Json to_json(const CountResult& r);
Json to_json(const Reduction& r);
Json to_json(const IsospectralReport& r);
Json to_json(const DegeneracyReport& r);
Json to_json(const RemainderRecord& r);
Json to_json(const FitResult& r);
Json to_json(const SweepSpec& s);

RemainderRecord record_from_json(const Json& j, const std::string& path = "records");

// Strict reader over one JSON object: every key must be consumed, type
// mismatches and leftovers raise InvalidArgument naming "path.key".
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const;  // present and not null
  void touch(const std::string& key) { seen_.insert(key); }
  const Json& raw(const std::string& key);
  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<int> integers(const std::string& key);
  std::vector<std::string> strings(const std::string& key);
  std::string field(const std::string& key) const { return path_ + "." + key; }
  // Throws for any key not read so far.
  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ParameterMap parameters_from_json(const Json& j, const std::string& path);

// "bump" | "indicator" | "one", or an object with kind and geometry.
CutoffSpec cutoff_spec_from_json(const Json& j, const std::string& path);

SweepSpec sweep_spec_from_json(const Json& j, const std::string& path = "sweep");

}  // namespace magweyl
