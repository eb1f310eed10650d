// Copyright 2026 The gbx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gbx/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "gbx/csv.hpp"
#include "gbx/error.hpp"

namespace gbx {
namespace {

constexpr double kSafeProbability = 1e-6;

struct FitPoint {
  double voltage_mv;
  double target_khz;
};

// With v_th and alpha fixed the relative-residual least squares problem is
// linear in k; solve it in closed form and return the objective.
struct ProjectedFit {
  double k;
  double cost;
};

ProjectedFit project(const std::vector<FitPoint>& pts, double v_th,
                     double alpha) {
  double su = 0.0, suu = 0.0;
  for (const auto& p : pts) {
    const double u =
        std::pow(p.voltage_mv - v_th, alpha) / p.voltage_mv / p.target_khz;
    su += u;
    suu += u * u;
  }
  const double k = su / suu;
  double cost = 0.0;
  for (const auto& p : pts) {
    const double u =
        std::pow(p.voltage_mv - v_th, alpha) / p.voltage_mv / p.target_khz;
    cost += (k * u - 1.0) * (k * u - 1.0);
  }
  return {k, cost};
}

struct Shape {
  double v_th;
  double alpha;
};

constexpr double kAlphaMin = 0.05;
constexpr double kAlphaMax = 2.0;

double bounded_cost(const std::vector<FitPoint>& pts, double v_max,
                    const Shape& s) {
  if (s.alpha < kAlphaMin || s.alpha > kAlphaMax || s.v_th < 0.0 ||
      s.v_th >= v_max) {
    return std::numeric_limits<double>::infinity();
  }
  return project(pts, s.v_th, s.alpha).cost;
}

Shape fit_shape(const std::vector<FitPoint>& pts) {
  const double v_max = kMinSupplyMv - 1.0;

  Shape best{0.0, 1.0};
  double best_cost = std::numeric_limits<double>::infinity();
  for (double v_th = 0.0; v_th < v_max; v_th += 5.0) {
    for (double alpha = kAlphaMin; alpha <= kAlphaMax + 1e-12; alpha += 0.01) {
      const double c = bounded_cost(pts, v_max, {v_th, alpha});
      if (c < best_cost) {
        best_cost = c;
        best = {v_th, alpha};
      }
    }
  }

  // Nelder-Mead polish around the grid optimum.
  std::array<Shape, 3> simplex{best, Shape{best.v_th + 5.0, best.alpha},
                               Shape{best.v_th, best.alpha + 0.01}};
  std::array<double, 3> cost{};
  for (int i = 0; i < 3; ++i) cost[i] = bounded_cost(pts, v_max, simplex[i]);

  for (int iter = 0; iter < 2000; ++iter) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return cost[a] < cost[b]; });
    const int lo = order[0], mid = order[1], hi = order[2];
    if (std::abs(cost[hi] - cost[lo]) < 1e-20) break;

    const Shape centroid{(simplex[lo].v_th + simplex[mid].v_th) / 2.0,
                         (simplex[lo].alpha + simplex[mid].alpha) / 2.0};
    auto along = [&](double t) {
      return Shape{centroid.v_th + t * (simplex[hi].v_th - centroid.v_th),
                   centroid.alpha + t * (simplex[hi].alpha - centroid.alpha)};
    };
    const Shape reflected = along(-1.0);
    const double c_ref = bounded_cost(pts, v_max, reflected);
    if (c_ref < cost[lo]) {
      const Shape expanded = along(-2.0);
      const double c_exp = bounded_cost(pts, v_max, expanded);
      if (c_exp < c_ref) {
        simplex[hi] = expanded;
        cost[hi] = c_exp;
      } else {
        simplex[hi] = reflected;
        cost[hi] = c_ref;
      }
    } else if (c_ref < cost[mid]) {
      simplex[hi] = reflected;
      cost[hi] = c_ref;
    } else {
      const Shape contracted = along(0.5);
      const double c_con = bounded_cost(pts, v_max, contracted);
      if (c_con < cost[hi]) {
        simplex[hi] = contracted;
        cost[hi] = c_con;
      } else {
        for (int i : {mid, hi}) {
          simplex[i] = {(simplex[i].v_th + simplex[lo].v_th) / 2.0,
                        (simplex[i].alpha + simplex[lo].alpha) / 2.0};
          cost[i] = bounded_cost(pts, v_max, simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(cost.begin(), cost.end());
  return simplex[static_cast<std::size_t>(it - cost.begin())];
}

void require_target(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("calibration target '") + field + "' " + rule);
  }
}

}  // namespace

void CalibrationTargets::validate() const {
  require_target(multiplier_at_min_mv > 1.0 && multiplier_at_max_mv > 1.0,
                 "multiplier", "must exceed 1");
  require_target(std::isfinite(onset_margin_khz) && onset_margin_khz >= 0.0,
                 "onset_margin_khz", "must be non-negative");
  require_target(crossover_mv > kMinSupplyMv, "crossover_mv",
                 "must lie above the lowest supply step");
  require_target(lock_offset_at_min_khz >= 0.0, "lock_offset_at_min_khz",
                 "must be non-negative");
  require_target(w_err_khz > 0.0 && w_lock_khz > 0.0, "w_*_khz",
                 "must be positive");
  require_target(savings_target >= 0.0 && savings_target < 1.0,
                 "savings_target", "must lie in [0, 1)");
  require_target(reference_freq_khz > 0, "reference_freq_khz",
                 "must be positive");
  require_target(reference_cores >= 1 && reference_cores <= kMaxActiveCores,
                 "reference_cores", "must lie in [1, 9]");
  require_target(c_eff > 0.0, "c_eff", "must be positive");
  require_target(cycles_per_item > 0.0, "cycles_per_item", "must be positive");
  require_target(tolerance > 0.0, "tolerance", "must be positive");
}

double CalibrationTargets::multiplier(int voltage_mv) const {
  const double t = static_cast<double>(voltage_mv - kMinSupplyMv) /
                   (kMaxSupplyMv - kMinSupplyMv);
  return multiplier_at_min_mv + t * (multiplier_at_max_mv - multiplier_at_min_mv);
}

CalibrationResult calibrate(const GuardbandTable& table,
                            const CalibrationTargets& targets) {
  targets.validate();

  std::vector<FitPoint> pts;
  for (const auto& row : table.rows()) {
    pts.push_back({static_cast<double>(row.voltage_mv),
                   targets.multiplier(row.voltage_mv) *
                           static_cast<double>(row.cluster_max_khz) +
                       targets.onset_margin_khz});
  }
  const Shape shape = fit_shape(pts);
  const double k = project(pts, shape.v_th, shape.alpha).k;

  CalibrationResult result;
  auto& p = result.params;
  p.v_th_mv = shape.v_th;
  p.alpha = shape.alpha;
  p.k_err = k;
  p.k_lock = k;
  p.w_err_khz = targets.w_err_khz;
  p.w_lock_khz = targets.w_lock_khz;
  p.crossover_mv = targets.crossover_mv;
  p.lock_offset_slope_khz_per_mv =
      targets.lock_offset_at_min_khz / (targets.crossover_mv - kMinSupplyMv);
  p.c_eff = targets.c_eff;
  p.cycles_per_item = targets.cycles_per_item;

  // Rows come highest voltage first; report lowest first.
  double previous_error = 0.0, previous_lock = 0.0;
  for (auto it = table.rows().rbegin(); it != table.rows().rend(); ++it) {
    const auto onset = onset_frequencies(p, it->voltage_mv);
    const double target = targets.multiplier(it->voltage_mv) *
                          static_cast<double>(it->cluster_max_khz);
    const double rel = (onset.error_khz - target) / target;
    result.onsets.push_back(
        {it->voltage_mv, target, onset.error_khz, onset.lockup_khz, rel});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(rel));
    if (it != table.rows().rbegin() &&
        (onset.error_khz <= previous_error || onset.lockup_khz <= previous_lock)) {
      throw Error(ErrorCode::kCalibrationDiverged,
                  "fitted onsets do not increase with voltage");
    }
    previous_error = onset.error_khz;
    previous_lock = onset.lockup_khz;
  }
  if (result.max_rel_error > targets.tolerance) {
    throw Error(ErrorCode::kCalibrationDiverged,
                "onset fit misses a headroom target by " +
                    std::to_string(result.max_rel_error * 100.0) + "% (> " +
                    std::to_string(targets.tolerance * 100.0) + "%)");
  }

  // Static power from the savings target at the reference frequency. The
  // baseline is the cheapest in-guardband voltage there, the candidate the
  // lowest supply step that is failure-free there. Energy per cycle at
  // fixed f is c*n*V^2 + s*V/f, so with a = s / (c*n*f):
  //   1 - S = (Vc^2 + a*Vc) / (Vb^2 + a*Vb)
  const auto baseline_mv =
      table.lowest_voltage_for(targets.reference_freq_khz, ClockDomain::kCluster);
  if (!baseline_mv) {
    throw Error(ErrorCode::kCalibrationDiverged,
                "reference frequency lies outside every guardband");
  }
  int candidate_mv = 0;
  for (int v : kSupplyStepsMv) {
    const auto probs = outcome_probabilities(
        p, OperatingPoint(v, targets.reference_freq_khz));
    if (probs.p_error < kSafeProbability && probs.p_lockup < kSafeProbability) {
      candidate_mv = v;
      break;
    }
  }
  if (candidate_mv == 0 || candidate_mv >= *baseline_mv) {
    throw Error(ErrorCode::kCalibrationDiverged,
                "no failure-free voltage below the guardband voltage at the "
                "reference frequency");
  }
  const double vb = *baseline_mv / 1000.0;
  const double vc = candidate_mv / 1000.0;
  const double keep = 1.0 - targets.savings_target;
  double a = (vc * vc - keep * vb * vb) / (keep * vb - vc);
  if (std::abs(a) < 1e-12) a = 0.0;
  if (!std::isfinite(a) || a < 0.0) {
    throw Error(ErrorCode::kCalibrationDiverged,
                "savings target " + std::to_string(targets.savings_target) +
                    " is unreachable with non-negative static power");
  }
  const double f_ref_hz = static_cast<double>(targets.reference_freq_khz) * 1e3;
  p.p_static_coeff = a * targets.c_eff * targets.reference_cores * f_ref_hz;
  p.validate();

  const OperatingPoint base_op(*baseline_mv, targets.reference_freq_khz);
  const OperatingPoint cand_op(candidate_mv, targets.reference_freq_khz);
  result.savings_baseline_mv = *baseline_mv;
  result.savings_candidate_mv = candidate_mv;
  result.reference_savings =
      1.0 - power(p, cand_op, targets.reference_cores) /
                power(p, base_op, targets.reference_cores);
  result.reference_power_w = power(p, OperatingPoint(1000, 200'000), 8);
  return result;
}

const DeviceModelParams& default_calibrated_params() {
  static const DeviceModelParams params =
      calibrate(GuardbandTable::gap8(), CalibrationTargets{}).params;
  return params;
}

void write_calibration_report(std::ostream& out, const CalibrationResult& r) {
  using csv::format_double;
  const auto& p = r.params;
  out << "format_version = 1\n";
  out << "model.v_th_mv = " << format_double(p.v_th_mv) << '\n';
  out << "model.alpha = " << format_double(p.alpha) << '\n';
  out << "model.k_err = " << format_double(p.k_err) << '\n';
  out << "model.k_lock = " << format_double(p.k_lock) << '\n';
  out << "model.w_err_khz = " << format_double(p.w_err_khz) << '\n';
  out << "model.w_lock_khz = " << format_double(p.w_lock_khz) << '\n';
  out << "model.crossover_mv = " << format_double(p.crossover_mv) << '\n';
  out << "model.lock_offset_slope_khz_per_mv = "
      << format_double(p.lock_offset_slope_khz_per_mv) << '\n';
  out << "model.c_eff = " << format_double(p.c_eff) << '\n';
  out << "model.p_static_coeff = " << format_double(p.p_static_coeff) << '\n';
  out << "model.cycles_per_item = " << format_double(p.cycles_per_item) << '\n';
  if (p.supply_offset) {
    out << "model.supply_offset.from_mv = " << p.supply_offset->from_mv << '\n';
    out << "model.supply_offset.offset_mv = "
        << format_double(p.supply_offset->offset_mv) << '\n';
  }
  for (const auto& o : r.onsets) {
    const std::string key = "onset." + std::to_string(o.voltage_mv) + ".";
    out << key << "target_khz = " << format_double(o.target_khz) << '\n';
    out << key << "error_khz = " << format_double(o.error_khz) << '\n';
    out << key << "lockup_khz = " << format_double(o.lockup_khz) << '\n';
    out << key << "rel_error = " << format_double(o.rel_error) << '\n';
  }
  out << "fit.max_rel_error = " << format_double(r.max_rel_error) << '\n';
  out << "savings.baseline_mv = " << r.savings_baseline_mv << '\n';
  out << "savings.candidate_mv = " << r.savings_candidate_mv << '\n';
  out << "savings.reference = " << format_double(r.reference_savings) << '\n';
  out << "power.w_at_1000mv_200mhz_8cores = "
      << format_double(r.reference_power_w) << '\n';
}

DeviceModelParams read_params_report(std::istream& in) {
  std::map<std::string, std::string, std::less<>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError,
                  "report line without '=': " + std::string(text));
    }
    kv.emplace(std::string(csv::trim(text.substr(0, eq))),
               std::string(csv::trim(text.substr(eq + 1))));
  }
  auto number = [&](const char* key) {
    const auto it = kv.find(key);
    double value = 0.0;
    if (it == kv.end() || !csv::parse_double(it->second, value)) {
      throw Error(ErrorCode::kConfigError,
                  std::string("report is missing numeric key ") + key);
    }
    return value;
  };
  DeviceModelParams p;
  p.v_th_mv = number("model.v_th_mv");
  p.alpha = number("model.alpha");
  p.k_err = number("model.k_err");
  p.k_lock = number("model.k_lock");
  p.w_err_khz = number("model.w_err_khz");
  p.w_lock_khz = number("model.w_lock_khz");
  p.crossover_mv = number("model.crossover_mv");
  p.lock_offset_slope_khz_per_mv = number("model.lock_offset_slope_khz_per_mv");
  p.c_eff = number("model.c_eff");
  p.p_static_coeff = number("model.p_static_coeff");
  p.cycles_per_item = number("model.cycles_per_item");
  if (kv.count("model.supply_offset.offset_mv") != 0) {
    p.supply_offset = SupplyOffset{
        static_cast<int>(number("model.supply_offset.from_mv")),
        number("model.supply_offset.offset_mv")};
  }
  p.validate();
  return p;
}

}  // namespace gbx
