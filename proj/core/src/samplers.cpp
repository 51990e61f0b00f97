#include "mlmc/samplers.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mlmc {

RandomStream sample_stream(const RandomStream& root, int level, std::int64_t index) {
  return root.split(kPurposeSample)
      .split(static_cast<std::uint64_t>(level))
      .split(static_cast<std::uint64_t>(index));
}

SampleRecord backend_draw(const SampleBackend& backend, int level, std::int64_t index,
                          const RandomStream& root) {
  if (level < 0 || level > backend.max_level())
    throw std::invalid_argument("level " + std::to_string(level) + " outside backend range [0," +
                                std::to_string(backend.max_level()) + "]");
  if (index < 0) throw std::invalid_argument("negative sample index");
  return backend.draw(level, index, root);
}

double SyntheticRates::level_mean_q(int level) const {
  return q_limit + rates.c_b * std::pow(8.0, -rates.alpha * level);
}

double SyntheticRates::mean_y(int level) const {
  if (level == 0) return level_mean_q(0);
  return rates.c_b * (std::pow(8.0, -rates.alpha * level) - std::pow(8.0, -rates.alpha * (level - 1)));
}

double SyntheticRates::var_y(int level) const { return rates.c_v * std::pow(8.0, -rates.beta * level); }

double SyntheticRates::cost(int level) const { return rates.c_c * std::pow(8.0, rates.gamma * level); }

SampleRecord synthetic_sample(int level, const SyntheticRates& rates,
                              const perf::RuntimeFactorDistribution& factors, RandomStream stream) {
  if (level < 0) throw std::invalid_argument("level must be >= 0");
  SampleRecord r;
  r.level = level;
  r.stream_id = stream.path_hash();
  const double sd = std::sqrt(rates.var_y(level));
  double z = 0.0;
  if (sd > 0.0) {
    if (rates.noise == NoiseKind::gaussian)
      z = stream.normal();
    else
      z = (2.0 * stream.uniform() - 1.0) * std::sqrt(3.0);  // unit variance
  }
  r.y_value = rates.mean_y(level) + sd * z;
  r.q_fine = rates.level_mean_q(level) + sd * z;
  if (level == 0) r.q_fine = r.y_value;
  RandomStream cost_stream = stream.split(kPurposeCost);
  r.duration = rates.cost(level) * factors.draw(cost_stream);
  return r;
}

SyntheticBackend::SyntheticBackend(SyntheticRates rates, int max_level,
                                   perf::RuntimeFactorDistribution factors)
    : rates_(rates), max_level_(max_level), factors_(std::move(factors)) {
  if (max_level < 0) throw std::invalid_argument("max_level must be >= 0");
  if (!(rates_.rates.alpha > 0.0) || !(rates_.rates.c_c > 0.0) || !(rates_.rates.c_v >= 0.0))
    throw std::invalid_argument("invalid synthetic rates");
}

SampleRecord SyntheticBackend::draw(int level, std::int64_t index, const RandomStream& root) const {
  SampleRecord r = synthetic_sample(level, rates_, factors_, sample_stream(root, level, index));
  r.index = index;
  return r;
}

void write_samples_csv(std::ostream& os, std::span<const SampleRecord> samples) {
  os << "level,index,y,q_fine,duration,stream_id\n";
  os << std::setprecision(17);
  for (const auto& s : samples)
    os << s.level << ',' << s.index << ',' << s.y_value << ',' << s.q_fine << ',' << s.duration
       << ',' << s.stream_id << '\n';
}

}  // namespace mlmc
