#pragma once

// Parameter sweeps over one pricing axis (optionally two, for the
// strike x maturity surface) and the CSV rendering shared by the CLI.

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfbm_asian/model.hpp"
#include "mfbm_asian/pricing.hpp"

namespace mfbm {

enum class SweepAxis { hurst, sigma_j, mu_j, strike, maturity };

inline const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::hurst: return "hurst";
    case SweepAxis::sigma_j: return "sigma_j";
    case SweepAxis::mu_j: return "mu_j";
    case SweepAxis::strike: return "strike";
    case SweepAxis::maturity: return "maturity";
  }
  return "?";
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::strike;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  std::optional<SweepAxis> second_axis;
  double start2 = 0.0;
  double stop2 = 0.0;
  std::size_t count2 = 0;
  ModelParams base_model;
  OptionContract base_contract;

  void validate() const {
    base_model.validate();
    base_contract.validate();
    validate_axis(axis, start, stop, count);
    if (second_axis) {
      if (*second_axis == axis) {
        throw std::invalid_argument("SweepSpec: the two axes must differ");
      }
      validate_axis(*second_axis, start2, stop2, count2);
    }
  }

 private:
  static void validate_axis(SweepAxis axis, double start, double stop,
                            std::size_t count) {
    if (!(start < stop)) throw std::invalid_argument("SweepSpec: start must be < stop");
    if (count < 2) throw std::invalid_argument("SweepSpec: count must be >= 2");
    switch (axis) {
      case SweepAxis::hurst:
        if (!(start > 0.0 && stop < 1.0)) {
          throw std::invalid_argument("SweepSpec: hurst range must stay in (0,1)");
        }
        break;
      case SweepAxis::sigma_j:
        if (!(start >= 0.0)) {
          throw std::invalid_argument("SweepSpec: sigma_j range must be >= 0");
        }
        break;
      case SweepAxis::strike:
        if (!(start >= 0.0)) {
          throw std::invalid_argument("SweepSpec: strike range must be >= 0");
        }
        break;
      case SweepAxis::maturity:
        if (!(start > 0.0)) {
          throw std::invalid_argument("SweepSpec: maturity range must be > 0");
        }
        break;
      case SweepAxis::mu_j:
        break;
    }
  }
};

struct SweepRow {
  double axis_value = 0.0;
  std::optional<double> axis2_value;
  PriceResult result;
};

namespace detail {

inline void apply_axis(SweepAxis axis, double value, ModelParams& model,
                       OptionContract& contract) {
  switch (axis) {
    case SweepAxis::hurst: model.hurst = value; break;
    case SweepAxis::sigma_j: model.sigma_j = value; break;
    case SweepAxis::mu_j: model.mu_j = value; break;
    case SweepAxis::strike: contract.strike = value; break;
    case SweepAxis::maturity: contract.maturity = value; break;
  }
}

inline double axis_point(double start, double stop, std::size_t count, std::size_t i) {
  return start + (stop - start) * static_cast<double>(i) /
                     static_cast<double>(count - 1);
}

}  // namespace detail

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec,
                                       const TruncationPolicy& policy = {}) {
  spec.validate();
  std::vector<SweepRow> rows;
  const std::size_t inner = spec.second_axis ? spec.count2 : 1;
  rows.reserve(spec.count * inner);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const double v1 = detail::axis_point(spec.start, spec.stop, spec.count, i);
    for (std::size_t j = 0; j < inner; ++j) {
      ModelParams model = spec.base_model;
      OptionContract contract = spec.base_contract;
      detail::apply_axis(spec.axis, v1, model, contract);
      SweepRow row;
      row.axis_value = v1;
      if (spec.second_axis) {
        const double v2 = detail::axis_point(spec.start2, spec.stop2, spec.count2, j);
        detail::apply_axis(*spec.second_axis, v2, model, contract);
        row.axis2_value = v2;
      }
      row.result = price(model, contract, policy);
      rows.push_back(row);
    }
  }
  return rows;
}

// 12 significant digits; round-trips through strtod at this precision.
inline std::string format_sig12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::string out = spec.second_axis
                        ? "axis_value,axis2_value,price,lower_bound,upper_bound,"
                          "error_bound,series_terms\n"
                        : "axis_value,price,lower_bound,upper_bound,error_bound,"
                          "series_terms\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_sig12(*v) : std::string();
  };
  for (const SweepRow& row : rows) {
    out += format_sig12(row.axis_value);
    if (row.axis2_value) {
      out += ',';
      out += format_sig12(*row.axis2_value);
    }
    out += ',';
    out += format_sig12(row.result.price);
    out += ',';
    out += opt(row.result.lower_bound);
    out += ',';
    out += opt(row.result.upper_bound);
    out += ',';
    out += opt(row.result.error_bound);
    out += ',';
    out += std::to_string(row.result.series_terms);
    out += '\n';
  }
  return out;
}

}  // namespace mfbm
