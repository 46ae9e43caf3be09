#pragma once

#include "mtforge/manifest.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace mtforge::pipeline {

using ParamValue = std::variant<std::string, std::int64_t, double, bool>;

/// Typed access to a stage's parameter map.
class Params {
public:
  explicit Params(const std::map<std::string, ParamValue> *values)
      : values_(values) {}

  std::string get_string(const std::string &name,
                         const std::string &fallback) const;
  std::int64_t get_int(const std::string &name, std::int64_t fallback) const;
  double get_real(const std::string &name, double fallback) const;
  bool get_bool(const std::string &name, bool fallback) const;
  bool has(const std::string &name) const;

private:
  const ParamValue *find(const std::string &name) const;
  const std::map<std::string, ParamValue> *values_;
};

struct StageConfig {
  std::string name;
  std::string module;
  std::string op;
  std::map<std::string, std::string> in;  // logical name -> path
  std::map<std::string, std::string> out; // logical name -> path
  std::map<std::string, ParamValue> params;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  unsigned shards = 1;
  std::optional<std::string> report;
  std::vector<StageConfig> stages;

  static PipelineConfig from_json(const std::string &text);
  static PipelineConfig load(const std::string &path);
};

struct StageContext {
  std::uint64_t seed = 0;
  unsigned shards = 1;
  std::size_t stage_index = 0;
  const StageConfig *config = nullptr;
  Params params{nullptr};
  CorpusManifest manifest;
  std::uint64_t records_in = 0;
  std::uint64_t records_out = 0;

  /// Path for a logical input/output name; throws if absent.
  const std::string &in(const std::string &name) const;
  const std::string &out(const std::string &name) const;
  bool has_in(const std::string &name) const;
  bool has_out(const std::string &name) const;
};

enum class ParamType { string, integer, real, boolean };

struct StageSpec {
  std::vector<std::string> required_in;
  std::vector<std::string> optional_in;
  bool variadic_in = false; // extra input names allowed (model batches)
  std::vector<std::string> required_out;
  std::vector<std::string> optional_out;
  std::map<std::string, ParamType> params;
  std::vector<std::string> required_params;
  std::function<void(StageContext &)> run;
};

/// All runnable operations, keyed "module.op".
const std::map<std::string, StageSpec> &stage_registry();

/// Every problem in the config, without executing any stage code. An
/// empty result means the pipeline is runnable.
std::vector<std::string> validate(const PipelineConfig &config);

struct StageReport {
  std::string name;
  std::string op; // "module.op"
  double duration_ms = 0.0;
  std::uint64_t records_in = 0;
  std::uint64_t records_out = 0;
  CorpusManifest manifest;
};

struct RunResult {
  int exit_code = 0; // 0 ok, 1 stage error, 2 validation error
  std::vector<std::string> diagnostics;
  std::vector<StageReport> stage_reports;
  std::string failed_stage; // set when exit_code == 1
  std::string error;
};

/// Validates, then executes stages in order. The report (structured
/// text) goes to report_out and, when the config names a report path,
/// to that file as well.
RunResult run_pipeline(const PipelineConfig &config, std::ostream &report_out);

void write_report(const RunResult &result, const PipelineConfig &config,
                  std::ostream &out);

} // namespace mtforge::pipeline
