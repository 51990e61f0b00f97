#pragma once

// Sample-backend contract and the closed-form synthetic backend.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "mlmc/estimator.hpp"
#include "mlmc/perf_model.hpp"
#include "mlmc/random.hpp"

namespace mlmc {

// Fixed split ids; together with level and sample index they key every
// random stream used by a sample.
enum StreamPurpose : std::uint64_t {
  kPurposeSample = 0x5A4D,
  kPurposeCost = 0xC057,
  kPurposeField = 0xF1E1D,
};

struct SampleRecord {
  int level = 0;
  std::int64_t index = 0;
  double y_value = 0.0;  // Y_l = Q_l - Q_{l-1}, Y_0 = Q_0
  double q_fine = 0.0;   // Q_l
  double duration = 0.0; // seconds (modeled or measured)
  std::uint64_t stream_id = 0;
};

// Stream of sample (level, index) under `root`.
RandomStream sample_stream(const RandomStream& root, int level, std::int64_t index);

class SampleBackend {
 public:
  virtual ~SampleBackend() = default;
  virtual int max_level() const = 0;
  virtual std::string name() const = 0;
  // Must be reproducible in (level, index, root) and safe to call
  // concurrently for distinct (level, index).
  virtual SampleRecord draw(int level, std::int64_t index, const RandomStream& root) const = 0;
};

// Checked dispatch to `backend.draw`.
SampleRecord backend_draw(const SampleBackend& backend, int level, std::int64_t index,
                          const RandomStream& root);

enum class NoiseKind { gaussian, uniform };

struct SyntheticRates {
  ConvergenceRates rates;
  double q_limit = 0.0;
  NoiseKind noise = NoiseKind::gaussian;

  // E[Q_l] = q_limit + c_b 8^{-alpha l}.
  double level_mean_q(int level) const;
  // E[Y_l]; for l = 0 this is E[Q_0].
  double mean_y(int level) const;
  // V[Y_l] = c_v 8^{-beta l}.
  double var_y(int level) const;
  // Expected cost c_c 8^{gamma l} (times the factor mean).
  double cost(int level) const;
};

// Y_l drawn with the exact mean/variance of the rates; duration
// c_c 8^{gamma l} times a cost factor.
SampleRecord synthetic_sample(int level, const SyntheticRates& rates,
                              const perf::RuntimeFactorDistribution& factors, RandomStream stream);

class SyntheticBackend final : public SampleBackend {
 public:
  SyntheticBackend(SyntheticRates rates, int max_level,
                   perf::RuntimeFactorDistribution factors = perf::RuntimeFactorDistribution::constant());

  int max_level() const override { return max_level_; }
  std::string name() const override { return "synthetic"; }
  SampleRecord draw(int level, std::int64_t index, const RandomStream& root) const override;

  const SyntheticRates& rates() const noexcept { return rates_; }

 private:
  SyntheticRates rates_;
  int max_level_;
  perf::RuntimeFactorDistribution factors_;
};

void write_samples_csv(std::ostream& os, std::span<const SampleRecord> samples);

}  // namespace mlmc
