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

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ppbench/errors.hpp"
#include "ppbench/random.hpp"

namespace ppbench::data {

struct Dataset {
  std::vector<std::uint64_t> values;
  std::string provenance;

  std::size_t size() const noexcept { return values.size(); }
};

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

// Splits RFC-4180 text into records. Quoted fields may contain delimiters,
// doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    const bool blank = record.size() == 1 && record.front().empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw CsvError(CsvError::Kind::kMalformed, records.size(), "csv: unterminated quote");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline char detect_delimiter(std::string_view text) {
  const std::string_view header = text.substr(0, text.find('\n'));
  if (header.find(',') == std::string_view::npos && header.find(';') != std::string_view::npos) {
    return ';';
  }
  return ',';
}

}  // namespace detail

// Round half up to a nonnegative integer; nullopt when out of range.
inline std::optional<std::uint64_t> round_half_up(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  const double r = std::floor(x + 0.5);
  if (r < 0.0 || r >= 0x1.0p63) return std::nullopt;
  return static_cast<std::uint64_t>(r);
}

// Loads one numeric column. A delimiter of '\0' picks ';' when the header has
// semicolons but no commas (the UCI bank files), ',' otherwise.
inline Dataset load_csv(const std::string& path, const std::string& column, char delimiter = '\0') {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(CsvError::Kind::kMissingFile, 0, "csv: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (delimiter == '\0') delimiter = detail::detect_delimiter(text);

  const auto records = detail::parse_csv(text, delimiter);
  if (records.empty()) {
    throw CsvError(CsvError::Kind::kMalformed, 0, "csv: '" + path + "' has no header row");
  }
  const auto& header = records.front();
  std::size_t col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (detail::trim(header[c]) == column) {
      col = c;
      break;
    }
  }
  if (col == header.size()) {
    throw CsvError(CsvError::Kind::kMissingColumn, 0,
                   "csv: column '" + column + "' not found in '" + path + "'");
  }

  Dataset out;
  out.provenance = path + ":" + column;
  out.values.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (col >= rec.size()) {
      throw CsvError(CsvError::Kind::kMalformed, r,
                     "csv: row " + std::to_string(r) + " has too few fields");
    }
    const std::string_view cell = detail::trim(rec[col]);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    std::optional<std::uint64_t> rounded;
    if (ec == std::errc() && ptr == cell.data() + cell.size() && !cell.empty()) {
      rounded = round_half_up(value);
    }
    if (!rounded) {
      throw CsvError(CsvError::Kind::kBadCell, r,
                     "csv: row " + std::to_string(r) + ", column '" + column +
                         "': not a nonnegative number: '" + std::string(cell) + "'");
    }
    out.values.push_back(*rounded);
  }
  return out;
}

inline void write_csv(std::ostream& out, const Dataset& dataset,
                      const std::string& column = "value") {
  out << column << '\n';
  for (const std::uint64_t v : dataset.values) out << v << '\n';
}

// ---------------------------------------------------------------------------
// Samplers

enum class Family { kUniform, kNormal, kGamma, kBeta };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kUniform: return "uniform";
    case Family::kNormal: return "normal";
    case Family::kGamma: return "gamma";
    case Family::kBeta: return "beta";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  if (name == "uniform") return Family::kUniform;
  if (name == "normal") return Family::kNormal;
  if (name == "gamma") return Family::kGamma;
  if (name == "beta") return Family::kBeta;
  return std::nullopt;
}

// Parameters per family: uniform (a, b) integer support [a, b); normal
// (mean, stddev); gamma (shape, scale); beta (alpha, beta). `scale_factor`
// multiplies continuous draws before rounding.
struct DistSpec {
  Family family = Family::kUniform;
  double p1 = 0.0;
  double p2 = 1.0;
  double scale_factor = 1.0;
  std::size_t size = 1;

  std::string label() const {
    std::ostringstream os;
    os << family_name(family) << '(' << p1 << ", " << p2 << ')';
    if (scale_factor != 1.0) os << 'x' << scale_factor;
    return os.str();
  }
};

inline void validate(const DistSpec& spec) {
  if (spec.size < 1) throw ParameterError("dist: dataset size must be at least 1");
  if (!(spec.scale_factor > 0.0) || !std::isfinite(spec.scale_factor)) {
    throw ParameterError("dist: scale factor must be positive");
  }
  switch (spec.family) {
    case Family::kUniform:
      if (!(spec.p1 >= 0.0) || !(spec.p2 > spec.p1) || spec.p2 >= 0x1.0p62 ||
          std::ceil(spec.p2) <= std::ceil(spec.p1)) {
        throw ParameterError("uniform: need 0 <= a < b with an integer in [a, b)");
      }
      if (spec.scale_factor != 1.0) throw ParameterError("uniform: scale factor must be 1");
      break;
    case Family::kNormal:
      if (!(spec.p2 > 0.0)) throw ParameterError("normal: stddev must be positive");
      if (!std::isfinite(spec.p1)) throw ParameterError("normal: mean must be finite");
      // Draws are resampled until nonnegative; refuse near-empty support.
      if (spec.p1 * spec.scale_factor < -6.0 * spec.p2 * spec.scale_factor) {
        throw ParameterError("normal: almost no mass on nonnegative values");
      }
      break;
    case Family::kGamma:
      if (!(spec.p1 > 0.0) || !(spec.p2 > 0.0)) {
        throw ParameterError("gamma: shape and scale must be positive");
      }
      break;
    case Family::kBeta:
      if (!(spec.p1 > 0.0) || !(spec.p2 > 0.0)) {
        throw ParameterError("beta: alpha and beta must be positive");
      }
      break;
  }
}

// Standard normal draws by the Box-Muller transform; keeps the spare.
class BoxMuller {
 public:
  explicit BoxMuller(Rng& rng) : rng_(&rng) {}

  double operator()() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double u1 = 1.0 - unit_uniform(*rng_);  // (0, 1]
    const double u2 = unit_uniform(*rng_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  Rng* rng_;
  std::optional<double> spare_;
};

// Gamma(shape, 1) by Marsaglia and Tsang; shape < 1 uses the U^(1/shape) boost.
inline double gamma_draw(Rng& rng, BoxMuller& normal, double shape) {
  if (shape < 1.0) {
    const double boosted = gamma_draw(rng, normal, shape + 1.0);
    const double u = 1.0 - unit_uniform(rng);
    return boosted * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z = 0.0;
    double v = 0.0;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - unit_uniform(rng);
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Draws `spec.size` values; reproducible for a given seed.
inline Dataset sample(const DistSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  BoxMuller normal(rng);
  Dataset out;
  out.provenance = spec.label() + " seed=" + std::to_string(seed);
  out.values.reserve(spec.size);

  auto emit = [&](double x) -> bool {
    const auto r = round_half_up(x * spec.scale_factor);
    if (!r) return false;
    out.values.push_back(*r);
    return true;
  };

  for (std::size_t i = 0; i < spec.size; ++i) {
    switch (spec.family) {
      case Family::kUniform: {
        const auto lo = static_cast<std::uint64_t>(std::ceil(spec.p1));
        const auto hi = static_cast<std::uint64_t>(std::ceil(spec.p2));
        out.values.push_back(lo + uniform_below(rng, hi - lo));
        break;
      }
      case Family::kNormal:
        // Negative draws are rejected and redrawn.
        while (!emit(spec.p1 + spec.p2 * normal())) {
        }
        break;
      case Family::kGamma:
        emit(gamma_draw(rng, normal, spec.p1) * spec.p2);
        break;
      case Family::kBeta: {
        const double x = gamma_draw(rng, normal, spec.p1);
        const double y = gamma_draw(rng, normal, spec.p2);
        emit(x / (x + y));
        break;
      }
    }
  }
  return out;
}

// The four families of the distribution sweep.
inline std::vector<DistSpec> default_sweep_distributions() {
  return {
      {Family::kUniform, 80.0, 160.0, 1.0, 1},
      {Family::kNormal, 120.0, 30.0, 1.0, 1},
      {Family::kGamma, 2.0, 2.0, 120.0, 1},
      {Family::kBeta, 30.0, 2.0, 120.0, 1},
  };
}

}  // namespace ppbench::data
