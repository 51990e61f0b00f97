#include "mlmc/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mlmc/errors.hpp"

namespace mlmc::perf {

void MachineConfig::validate() const {
  if (p0_min < 1) throw std::invalid_argument("p0_min must be >= 1");
  if (p_max < p0_min) throw std::invalid_argument("p_max must be >= p0_min");
  if (s_window < 0) throw std::invalid_argument("s_window must be >= 0");
}

std::int64_t MachineConfig::processors_per_sample(int level, int theta) const {
  if (level < 0 || theta < 0) throw std::invalid_argument("negative level or theta");
  const int shift = 3 * level + theta;
  if (shift >= 62) return std::numeric_limits<std::int64_t>::max();
  const std::int64_t base = std::int64_t{1} << shift;
  if (p0_min > std::numeric_limits<std::int64_t>::max() / base)
    return std::numeric_limits<std::int64_t>::max();
  return base * p0_min;
}

// ---------------------------------------------------------------------------

RuntimeFactorDistribution RuntimeFactorDistribution::constant() { return {}; }

RuntimeFactorDistribution RuntimeFactorDistribution::empirical(std::vector<double> runtimes) {
  if (runtimes.empty()) throw std::invalid_argument("empty run-time histogram");
  double sum = 0.0;
  for (double t : runtimes) {
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("histogram run-times must be positive");
    sum += t;
  }
  RuntimeFactorDistribution d;
  d.kind_ = FactorKind::empirical;
  d.histogram_ = std::move(runtimes);
  d.histogram_sum_ = sum;
  return d;
}

RuntimeFactorDistribution RuntimeFactorDistribution::half_normal(double var) {
  if (!(var >= 0.0) || !std::isfinite(var))
    throw std::invalid_argument("half-normal variance must be >= 0");
  RuntimeFactorDistribution d;
  d.kind_ = FactorKind::half_normal;
  d.var_ = var;
  return d;
}

double RuntimeFactorDistribution::normalized(std::size_t j) const {
  if (kind_ != FactorKind::empirical) throw std::logic_error("not an empirical distribution");
  return histogram_.at(j) * static_cast<double>(histogram_.size()) / histogram_sum_;
}

double RuntimeFactorDistribution::draw(RandomStream& stream) const {
  switch (kind_) {
    case FactorKind::constant:
      return 1.0;
    case FactorKind::empirical: {
      const auto j = stream.uniform_int(0, static_cast<std::int64_t>(histogram_.size()) - 1);
      return normalized(static_cast<std::size_t>(j));
    }
    case FactorKind::half_normal:
      if (var_ == 0.0) return 1.0;
      return 1.0 + std::abs(stream.normal()) * std::sqrt(var_);
  }
  return 1.0;
}

double RuntimeFactorDistribution::mean() const {
  switch (kind_) {
    case FactorKind::constant:
    case FactorKind::empirical:
      return 1.0;
    case FactorKind::half_normal:
      return 1.0 + std::sqrt(var_) * std::sqrt(2.0 / std::numbers::pi);
  }
  return 1.0;
}

bool RuntimeFactorDistribution::is_degenerate() const {
  switch (kind_) {
    case FactorKind::constant:
      return true;
    case FactorKind::half_normal:
      return var_ == 0.0;
    case FactorKind::empirical:
      return std::all_of(histogram_.begin(), histogram_.end(),
                         [&](double t) { return t == histogram_.front(); });
  }
  return false;
}

double draw_cost_factor(const RuntimeFactorDistribution& dist, RandomStream& stream) {
  return dist.draw(stream);
}

// ---------------------------------------------------------------------------

RunTimeModel::RunTimeModel(std::vector<std::vector<double>> t_ref,
                           RuntimeFactorDistribution factors)
    : t_ref_(std::move(t_ref)), factors_(std::move(factors)) {
  if (t_ref_.empty() || t_ref_.front().empty())
    throw std::invalid_argument("run-time matrix must be non-empty");
  const auto width = t_ref_.front().size();
  for (const auto& row : t_ref_) {
    if (row.size() != width) throw std::invalid_argument("ragged run-time matrix");
    for (double t : row)
      if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("run-times must be positive");
  }
}

RunTimeModel RunTimeModel::from_surrogate(std::span<const double> t_level0, double b,
                                          int s_window, RuntimeFactorDistribution factors) {
  if (s_window < 0) throw std::invalid_argument("s_window must be >= 0");
  std::vector<std::vector<double>> m;
  m.reserve(t_level0.size());
  for (double t0 : t_level0) {
    std::vector<double> row(static_cast<std::size_t>(s_window) + 1);
    for (int th = 0; th <= s_window; ++th) row[static_cast<std::size_t>(th)] = surrogate_time(t0, b, th);
    m.push_back(std::move(row));
  }
  RunTimeModel model(std::move(m), std::move(factors));
  model.b_ = b;
  model.surrogate_ = true;
  return model;
}

double RunTimeModel::time(int level, int theta) const {
  if (level < 0 || level >= levels() || theta < 0 || theta >= thetas())
    throw std::out_of_range("run-time index (" + std::to_string(level) + "," +
                            std::to_string(theta) + ") outside model");
  return t_ref_[static_cast<std::size_t>(level)][static_cast<std::size_t>(theta)];
}

std::vector<double> RunTimeModel::column0() const {
  std::vector<double> c;
  c.reserve(t_ref_.size());
  for (const auto& row : t_ref_) c.push_back(row.front());
  return c;
}

RunTimeModel RunTimeModel::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale must be positive");
  RunTimeModel out = *this;
  for (auto& row : out.t_ref_)
    for (double& t : row) t *= c;
  return out;
}

RunTimeModel RunTimeModel::with_factors(RuntimeFactorDistribution factors) const {
  RunTimeModel out = *this;
  out.factors_ = std::move(factors);
  return out;
}

// ---------------------------------------------------------------------------

double surrogate_time(double t_l0, double b, int theta) {
  if (!(t_l0 > 0.0)) throw std::invalid_argument("t_l0 must be positive");
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("b must lie in [0,1]");
  if (theta < 0) throw std::invalid_argument("theta must be >= 0");
  return t_l0 * (b + std::ldexp(1.0 - b, -theta));
}

double strong_efficiency(double t_l0, double t_ltheta, int theta) {
  if (!(t_l0 > 0.0) || !(t_ltheta > 0.0)) throw std::invalid_argument("times must be positive");
  if (theta < 0) throw std::invalid_argument("theta must be >= 0");
  return t_l0 / std::ldexp(t_ltheta, theta);
}

LevelMetrics level_metrics(const MachineConfig& machine, int level, std::int64_t n_samples,
                           int theta, double eff) {
  machine.validate();
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const std::int64_t per = machine.processors_per_sample(level, theta);
  if (per > machine.p_max)
    throw InfeasibleConfiguration("sample on level " + std::to_string(level) + " at theta " +
                                  std::to_string(theta) + " needs " + std::to_string(per) +
                                  " > p_max processors");
  LevelMetrics m;
  m.j_parallel = machine.p_max / per;
  m.k_seq = (n_samples + m.j_parallel - 1) / m.j_parallel;
  m.imbalance = 1.0 - static_cast<double>(per) * static_cast<double>(n_samples) /
                          (static_cast<double>(m.k_seq) * static_cast<double>(machine.p_max));
  if (per * n_samples == m.k_seq * machine.p_max) m.imbalance = 0.0;
  m.eff = eff;
  m.eta = (1.0 - m.imbalance) * eff;
  return m;
}

LevelMetrics level_metrics(const MachineConfig& machine, int level, std::int64_t n_samples,
                           int theta, const RunTimeModel& model) {
  return level_metrics(machine, level, n_samples, theta,
                       strong_efficiency(model.time(level, 0), model.time(level, theta), theta));
}

double theoretical_optimum(const MachineConfig& machine, std::span<const std::int64_t> n_per_level,
                           std::span<const double> t0_per_level,
                           std::span<const double> mean_factor) {
  machine.validate();
  if (n_per_level.size() != t0_per_level.size() || n_per_level.size() != mean_factor.size())
    throw std::invalid_argument("theoretical_optimum: length mismatch");
  double sum = 0.0;
  for (std::size_t l = 0; l < n_per_level.size(); ++l) {
    if (n_per_level[l] < 0 || !(t0_per_level[l] > 0.0) || !(mean_factor[l] > 0.0))
      throw std::invalid_argument("theoretical_optimum: non-positive input");
    sum += static_cast<double>(n_per_level[l]) * std::ldexp(1.0, 3 * static_cast<int>(l)) *
           mean_factor[l] * t0_per_level[l];
  }
  return sum * static_cast<double>(machine.p0_min) / static_cast<double>(machine.p_max);
}

double theoretical_optimum(const MachineConfig& machine, std::span<const std::int64_t> n_per_level,
                           std::span<const double> t0_per_level) {
  const std::vector<double> ones(n_per_level.size(), 1.0);
  return theoretical_optimum(machine, n_per_level, t0_per_level, ones);
}

ImbalanceGap imbalance_gap(const MachineConfig& machine, double runtime, double optimum,
                           std::span<const std::int64_t> n_per_level,
                           std::span<const double> t0_per_level) {
  if (!(optimum > 0.0)) throw std::invalid_argument("optimum must be positive");
  if (n_per_level.empty() || n_per_level.size() != t0_per_level.size())
    throw std::invalid_argument("imbalance_gap: length mismatch");
  ImbalanceGap g;
  g.delta_t = runtime / optimum - 1.0;
  for (std::size_t l = 0; l < n_per_level.size(); ++l)
    g.k_seq_global += static_cast<double>(n_per_level[l]) *
                      std::ldexp(1.0, 3 * static_cast<int>(l));
  g.k_seq_global *= static_cast<double>(machine.p0_min) / static_cast<double>(machine.p_max);
  const auto L1 = static_cast<double>(n_per_level.size());
  g.bound = (t0_per_level.back() / t0_per_level.front()) * L1 / g.k_seq_global;
  return g;
}

double fit_serial_fraction(std::span<const std::pair<int, double>> measured) {
  if (measured.size() < 2) throw std::invalid_argument("need at least two measurements");
  for (const auto& [th, t] : measured)
    if (th < 0 || !(t > 0.0)) throw std::invalid_argument("invalid measurement");
  const bool distinct = std::any_of(measured.begin(), measured.end(), [&](const auto& p) {
    return p.first != measured.front().first;
  });
  if (!distinct) throw std::invalid_argument("need at least two distinct theta values");

  double t0_sum = 0.0;
  int t0_count = 0;
  for (const auto& [th, t] : measured)
    if (th == 0) {
      t0_sum += t;
      ++t0_count;
    }

  double b;
  if (t0_count > 0) {
    // t/t0 - 2^-theta = b (1 - 2^-theta): one-parameter linear least squares.
    const double t0 = t0_sum / t0_count;
    double num = 0.0, den = 0.0;
    for (const auto& [th, t] : measured) {
      const double a = 1.0 - std::ldexp(1.0, -th);
      num += (t / t0 - std::ldexp(1.0, -th)) * a;
      den += a * a;
    }
    b = num / den;
  } else {
    // t = c1 + c2 2^-theta with c1 = t0 b, c2 = t0 (1 - b).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(measured.size());
    for (const auto& [th, t] : measured) {
      const double x = std::ldexp(1.0, -th);
      sx += x;
      sy += t;
      sxx += x * x;
      sxy += x * t;
    }
    const double c2 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double c1 = (sy - c2 * sx) / n;
    b = c1 / (c1 + c2);
  }
  return std::clamp(b, 0.0, 1.0);
}

}  // namespace mlmc::perf
