// Copyright 2026 The ppbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ppbench/errors.hpp"

namespace ppbench::stats {

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz method.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-12;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kTolerance) return h;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw DomainError("student_t: degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

// p-values under this are printed as "< 2.2e-16".
inline constexpr double kPValueFloor = 2.2e-16;

inline std::string format_p_value(double p) {
  if (p < kPValueFloor) return "< 2.2e-16";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", p);
  return buf;
}

// ---------------------------------------------------------------------------
// Simple linear regression y ~ beta0 + beta1 x

struct RegressionFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double stderr0 = 0.0;
  double stderr1 = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double p0 = 1.0;
  double p1 = 1.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

namespace detail {

inline std::pair<double, double> t_and_p(double beta, double se, double df) {
  if (se == 0.0) {
    if (beta == 0.0) return {0.0, 1.0};
    return {std::copysign(std::numeric_limits<double>::infinity(), beta), 0.0};
  }
  const double t = beta / se;
  return {t, student_t_two_sided_p(t, df)};
}

}  // namespace detail

// Least squares through a Householder QR factorization of the n x 2 design
// [1, x]. p-values come from two-sided t tests on n - 2 degrees of freedom.
inline RegressionFit fit_ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ParameterError("fit_ols: x and y differ in length");
  if (n < 3) throw ParameterError("fit_ols: need at least three points");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    throw SingularDesignError("fit_ols: x has zero variance");
  }

  // Column-major design and right-hand side, transformed in place to R and Q^T y.
  std::array<std::vector<double>, 2> a{std::vector<double>(n, 1.0),
                                       std::vector<double>(x.begin(), x.end())};
  std::vector<double> qty(y.begin(), y.end());
  std::array<double, 2> diag{};

  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double>& col = a[j];
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw SingularDesignError("fit_ols: rank-deficient design");
    const double alpha = col[j] > 0.0 ? -norm : norm;
    // v = col[j:] - alpha e_j, stored over col[j:].
    col[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += col[i] * col[i];
    auto reflect = [&](std::vector<double>& target) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += col[i] * target[i];
      const double scale = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) target[i] -= scale * col[i];
    };
    for (std::size_t k = j + 1; k < 2; ++k) reflect(a[k]);
    reflect(qty);
    diag[j] = alpha;
  }
  const double r00 = diag[0];
  const double r01 = a[1][0];
  const double r11 = diag[1];
  if (std::fabs(r11) <= 1e-14 * std::fabs(r00)) {
    throw SingularDesignError("fit_ols: x has (numerically) zero variance");
  }

  RegressionFit fit;
  fit.n_points = n;
  fit.beta1 = qty[1] / r11;
  fit.beta0 = (qty[0] - r01 * fit.beta1) / r00;

  double ssr = 0.0;
  for (std::size_t i = 2; i < n; ++i) ssr += qty[i] * qty[i];
  const double df = static_cast<double>(n - 2);
  const double sigma2 = ssr / df;

  // (R^T R)^{-1} = R^{-1} R^{-T} with R^{-1} = [[1/r00, -r01/(r00 r11)], [0, 1/r11]].
  const double inv00 = 1.0 / r00;
  const double inv01 = -r01 / (r00 * r11);
  const double inv11 = 1.0 / r11;
  fit.stderr0 = std::sqrt(sigma2 * (inv00 * inv00 + inv01 * inv01));
  fit.stderr1 = std::sqrt(sigma2 * inv11 * inv11);
  std::tie(fit.t0, fit.p0) = detail::t_and_p(fit.beta0, fit.stderr0, df);
  std::tie(fit.t1, fit.p1) = detail::t_and_p(fit.beta1, fit.stderr1, df);

  double y_mean = 0.0;
  for (const double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  double sst = 0.0;
  for (const double v : y) sst += (v - y_mean) * (v - y_mean);
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  return fit;
}

// Runtime samples recorded at one dataset size.
struct SizedSamples {
  std::size_t size = 0;
  std::vector<double> times_ms;
};

// Fits t ~ beta0 + beta1 * size either on every raw sample (pooled) or on the
// per-size means.
inline RegressionFit fit_runtime_vs_size(std::span<const SizedSamples> groups, bool pooled = true) {
  std::vector<double> x;
  std::vector<double> y;
  for (const SizedSamples& g : groups) {
    if (g.times_ms.empty()) continue;
    if (pooled) {
      for (const double t : g.times_ms) {
        x.push_back(static_cast<double>(g.size));
        y.push_back(t);
      }
    } else {
      double sum = 0.0;
      for (const double t : g.times_ms) sum += t;
      x.push_back(static_cast<double>(g.size));
      y.push_back(sum / static_cast<double>(g.times_ms.size()));
    }
  }
  return fit_ols(x, y);
}

// ---------------------------------------------------------------------------
// Report tables

struct ReportRow {
  std::string dataset;
  std::size_t size = 0;
  std::string protocol;
  std::size_t m = 0;
  double theta_cli = 0.0;
  double var_cli = 0.0;
  double theta_srv = 0.0;
  double var_srv = 0.0;
};

struct RegressionEntry {
  std::string protocol;
  bool pooled = true;
  RegressionFit fit;
};

struct ReportTable {
  std::string title;
  std::vector<ReportRow> rows;
  std::vector<RegressionEntry> regressions;
};

enum class Format { kMarkdown, kCsv, kJson };

inline const char* format_extension(Format f) {
  switch (f) {
    case Format::kMarkdown: return "md";
    case Format::kCsv: return "csv";
    case Format::kJson: return "json";
  }
  return "txt";
}

// Orders rows by dataset (first appearance), size, protocol, then M.
inline void sort_rows(ReportTable& table) {
  std::map<std::string, std::size_t> first_seen;
  for (const ReportRow& r : table.rows) first_seen.emplace(r.dataset, first_seen.size());
  std::stable_sort(table.rows.begin(), table.rows.end(), [&](const ReportRow& a, const ReportRow& b) {
    const std::size_t da = first_seen.at(a.dataset);
    const std::size_t db = first_seen.at(b.dataset);
    if (da != db) return da < db;
    if (a.size != b.size) return a.size < b.size;
    if (a.protocol != b.protocol) return a.protocol < b.protocol;
    return a.m < b.m;
  });
}

// Fixed notation, switching to scientific below 1e-3.
inline std::string format_number(double v) {
  char buf[48];
  const double mag = std::fabs(v);
  if (v == 0.0) return "0";
  if (mag < 1e-3) {
    std::snprintf(buf, sizeof buf, "%.2e", v);
  } else if (mag < 1.0) {
    std::snprintf(buf, sizeof buf, "%.3f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", v);
  }
  return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinities; they travel as strings.
inline nlohmann::json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

inline nlohmann::json fit_to_json(const RegressionFit& f) {
  return {{"beta0", number_to_json(f.beta0)},     {"beta1", number_to_json(f.beta1)},
          {"stderr0", number_to_json(f.stderr0)}, {"stderr1", number_to_json(f.stderr1)},
          {"t0", number_to_json(f.t0)},           {"t1", number_to_json(f.t1)},
          {"p0", number_to_json(f.p0)},           {"p1", number_to_json(f.p1)},
          {"r_squared", number_to_json(f.r_squared)}, {"n_points", f.n_points}};
}

inline RegressionFit fit_from_json(const nlohmann::json& j) {
  RegressionFit f;
  f.beta0 = number_from_json(j.at("beta0"));
  f.beta1 = number_from_json(j.at("beta1"));
  f.stderr0 = number_from_json(j.at("stderr0"));
  f.stderr1 = number_from_json(j.at("stderr1"));
  f.t0 = number_from_json(j.at("t0"));
  f.t1 = number_from_json(j.at("t1"));
  f.p0 = number_from_json(j.at("p0"));
  f.p1 = number_from_json(j.at("p1"));
  f.r_squared = number_from_json(j.at("r_squared"));
  f.n_points = j.at("n_points").get<std::size_t>();
  return f;
}

inline std::string render_markdown(const ReportTable& table) {
  std::ostringstream os;
  if (!table.title.empty()) os << "## " << table.title << "\n\n";
  os << "| Dataset | Size | Protocol | M | theta_cli | Var(theta_cli) | theta_srv | Var(theta_srv) |\n";
  os << "|---|---:|---|---:|---:|---:|---:|---:|\n";
  for (const ReportRow& r : table.rows) {
    os << "| " << r.dataset << " | " << r.size << " | " << r.protocol << " | " << r.m << " | "
       << format_number(r.theta_cli) << " | " << format_number(r.var_cli) << " | "
       << format_number(r.theta_srv) << " | " << format_number(r.var_srv) << " |\n";
  }
  if (!table.regressions.empty()) {
    os << "\n### t_cli ~ beta0 + beta1 * size\n\n";
    os << "| Protocol | Fit on | beta0 | beta1 | SE(beta0) | SE(beta1) | p(beta0) | p(beta1) | R^2 | n |\n";
    os << "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const RegressionEntry& e : table.regressions) {
      const RegressionFit& f = e.fit;
      os << "| " << e.protocol << " | " << (e.pooled ? "samples" : "means") << " | "
         << format_number(f.beta0) << " | " << format_number(f.beta1) << " | "
         << format_number(f.stderr0) << " | " << format_number(f.stderr1) << " | "
         << format_p_value(f.p0) << " | " << format_p_value(f.p1) << " | "
         << format_number(f.r_squared) << " | " << f.n_points << " |\n";
    }
  }
  return os.str();
}

inline std::string render_csv(const ReportTable& table) {
  std::ostringstream os;
  os << "dataset,size,protocol,M,theta_cli,var_cli,theta_srv,var_srv\n";
  for (const ReportRow& r : table.rows) {
    os << csv_escape(r.dataset) << ',' << r.size << ',' << csv_escape(r.protocol) << ',' << r.m
       << ',' << exact(r.theta_cli) << ',' << exact(r.var_cli) << ',' << exact(r.theta_srv) << ','
       << exact(r.var_srv) << '\n';
  }
  return os.str();
}

inline std::string render_json(const ReportTable& table) {
  nlohmann::json j;
  j["title"] = table.title;
  j["rows"] = nlohmann::json::array();
  for (const ReportRow& r : table.rows) {
    j["rows"].push_back({{"dataset", r.dataset},
                         {"size", r.size},
                         {"protocol", r.protocol},
                         {"M", r.m},
                         {"theta_cli", r.theta_cli},
                         {"var_cli", r.var_cli},
                         {"theta_srv", r.theta_srv},
                         {"var_srv", r.var_srv}});
  }
  j["regressions"] = nlohmann::json::array();
  for (const RegressionEntry& e : table.regressions) {
    j["regressions"].push_back(
        {{"protocol", e.protocol}, {"pooled", e.pooled}, {"fit", fit_to_json(e.fit)}});
  }
  return j.dump(2) + "\n";
}

}  // namespace detail

inline std::string render(const ReportTable& table, Format format = Format::kMarkdown) {
  switch (format) {
    case Format::kMarkdown: return detail::render_markdown(table);
    case Format::kCsv: return detail::render_csv(table);
    case Format::kJson: return detail::render_json(table);
  }
  return {};
}

// Inverse of render(table, Format::kJson).
inline ReportTable parse_json_report(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ReportTable table;
  table.title = j.value("title", "");
  for (const auto& r : j.at("rows")) {
    ReportRow row;
    row.dataset = r.at("dataset").get<std::string>();
    row.size = r.at("size").get<std::size_t>();
    row.protocol = r.at("protocol").get<std::string>();
    row.m = r.at("M").get<std::size_t>();
    row.theta_cli = r.at("theta_cli").get<double>();
    row.var_cli = r.at("var_cli").get<double>();
    row.theta_srv = r.at("theta_srv").get<double>();
    row.var_srv = r.at("var_srv").get<double>();
    table.rows.push_back(std::move(row));
  }
  if (j.contains("regressions")) {
    for (const auto& e : j.at("regressions")) {
      table.regressions.push_back({e.at("protocol").get<std::string>(), e.at("pooled").get<bool>(),
                                   detail::fit_from_json(e.at("fit"))});
    }
  }
  return table;
}

}  // namespace ppbench::stats
