#include "hqm/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hqm/errors.hpp"

#include "json.hpp"

namespace hqm {

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size(), ErrorKind::Precondition, "size mismatch");
  const size_t m = xs.size();
  require(m >= 4, ErrorKind::Precondition, "need at least 4 points for a slope fit");
  for (size_t i = 0; i + 1 < m; ++i)
    require((xs[i + 1] - xs[i]) * (xs[1] - xs[0]) > 0.0, ErrorKind::Precondition,
            "xs must be strictly monotone");
  std::vector<double> lx(m), ly(m);
  for (size_t i = 0; i < m; ++i) {
    require(xs[i] > 0.0 && ys[i] > 0.0, ErrorKind::Precondition,
            "fit_slope needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < m; ++i) { mx += lx[i]; my += ly[i]; }
  mx /= m; my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    rss += r * r;
  }
  const double se = std::sqrt(rss / (m - 2)) / std::sqrt(sxx);
  return {slope, se};
}

Metric metric_abs(const std::string& name, double value, double target, double tol) {
  Metric m{name, value, target, tol, "abs", std::fabs(value - target) <= tol};
  return m;
}

Metric metric_le(const std::string& name, double value, double bound, double tol) {
  Metric m{name, value, bound, tol, "le", value <= bound + tol};
  return m;
}

Metric metric_ge(const std::string& name, double value, double bound, double tol) {
  Metric m{name, value, bound, tol, "ge", value >= bound - tol};
  return m;
}

void ExperimentReport::set_param(const std::string& key, double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  params_[key] = os.str();
}

bool ExperimentReport::pass() const {
  if (metrics_.empty()) return false;  // every experiment registers >= 1 metric
  for (const Metric& m : metrics_)
    if (!m.pass) return false;
  return true;
}

const Metric& ExperimentReport::metric(const std::string& name) const {
  for (const Metric& m : metrics_)
    if (m.name == name) return m;
  throw Error(ErrorKind::Config, "no metric named " + name);
}

std::string ExperimentReport::to_json(const std::string& timestamp) const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment_;
  j["seed"] = seed_;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params_) p[k] = v;
  j["params"] = p;
  nlohmann::ordered_json ms = nlohmann::ordered_json::array();
  for (const Metric& m : metrics_) {
    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["value"] = m.value;
    mj["tol"] = m.tol;
    mj["pass"] = m.pass;
    mj["target"] = m.target;
    mj["kind"] = m.kind;
    ms.push_back(mj);
  }
  j["metrics"] = ms;
  j["artifacts"] = artifacts_;
  j["pass"] = pass();
  j["timestamp"] = timestamp;
  return j.dump(2);
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot open " + path);
  for (size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  out.precision(16);
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c)
      out << row[c] << (c + 1 < row.size() ? "," : "\n");
  }
}

}  // namespace hqm
