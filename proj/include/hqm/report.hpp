#ifndef HQM_REPORT_HPP
#define HQM_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include "hqm/types.hpp"

namespace hqm {

// Least-squares slope of log y against log x with its standard error.
// Every order-of-vanishing claim in the experiments reduces to this.
struct SlopeFit {
  double slope;
  double stderr;
};
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// One verified quantity inside an experiment. `kind` selects the pass rule:
//   abs  : |value - target| <= tol
//   le   : value <= target + tol
//   ge   : value >= target - tol
struct Metric {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tol = 0.0;
  std::string kind = "abs";
  bool pass = false;
};

Metric metric_abs(const std::string& name, double value, double target, double tol);
Metric metric_le(const std::string& name, double value, double bound, double tol = 0.0);
Metric metric_ge(const std::string& name, double value, double bound, double tol = 0.0);

// Structured record of an experiment: parameters, metrics with explicit
// tolerances, and the CSV artifacts it wrote.
class ExperimentReport {
 public:
  ExperimentReport(std::string experiment, std::uint64_t seed)
      : experiment_(std::move(experiment)), seed_(seed) {}

  void set_param(const std::string& key, const std::string& value) { params_[key] = value; }
  void set_param(const std::string& key, double value);
  void add_metric(Metric m) { metrics_.push_back(std::move(m)); }
  void add_artifact(const std::string& path) { artifacts_.push_back(path); }

  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Metric>& metrics() const { return metrics_; }
  const std::map<std::string, std::string>& params() const { return params_; }
  const std::vector<std::string>& artifacts() const { return artifacts_; }

  bool pass() const;
  const Metric& metric(const std::string& name) const;

  // Deterministic JSON (fixed key order); wall-clock stamp lives in its own
  // field so reports stay byte-comparable modulo timestamps.
  std::string to_json(const std::string& timestamp = "") const;

 private:
  std::string experiment_;
  std::uint64_t seed_;
  std::map<std::string, std::string> params_;
  std::vector<Metric> metrics_;
  std::vector<std::string> artifacts_;
};

// CSV writer for sweep tables: header row then one line per record.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

}  // namespace hqm

#endif
