#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acmtm/adaptation.hpp"
#include "acmtm/targets.hpp"

namespace acmtm {

enum class TargetFamily { GaussianMixture, Banana, Vcm };
enum class SamplerKind { Cmh, MixtureCmh, Cmtm, Acmtm, Acmh };

std::string_view to_string(TargetFamily f);
std::string_view to_string(SamplerKind k);

struct TargetSpec {
  TargetFamily family = TargetFamily::GaussianMixture;
  GaussianMixtureSpec mixture;
  BananaSpec banana;
  VcmSpec vcm;
  double support_half_width = kDefaultSupportHalfWidth;
};

/// Builds the model described by a target section.
TargetModel build_target(const TargetSpec& spec);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::Cmtm;
  Index proposals = 1;                  // m; 1 for cmh and acmh
  double alpha = 2.9;
  std::optional<Eigen::MatrixXd> grid;  // explicit d x m rows; generic rule when empty
  double scale = 1.0;                   // cmh / acmh starting scale
  std::int64_t beta = 100;
  ScaleBounds bounds;
  std::int64_t acmh_batch = 100;
  double acmh_target = 0.44;

  bool uses_grid() const {
    return kind == SamplerKind::Cmtm || kind == SamplerKind::Acmtm || kind == SamplerKind::MixtureCmh;
  }
};

/// Starting grid: explicit rows if given, else 2^(j-1-floor(m/2)); a d x 1
/// grid of `scale` for the CMH samplers.
ScaleGrid build_initial_grid(const SamplerSpec& spec, Index dim);

/// Half-space split used for region-conditioned selection tables.
struct RegionSpec {
  Index coordinate = 0;  // 0-based internally, 1-based in the config file
  double threshold = 0.0;
};

struct ExperimentSpec {
  std::string name = "experiment";
  TargetSpec target;
  SamplerSpec sampler;
  std::int64_t iterations = 10000;
  std::int64_t burn_in = 5000;
  int replicates = 1;
  std::uint64_t base_seed = 1;
  std::string outputs = "out";
  int threads = 1;
  int thin = 10;
  bool full_trace = false;
  std::optional<StateVector> initial_state;
  std::optional<RegionSpec> region;
  std::vector<double> alpha_sweep;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

/// Reads and validates a YAML experiment file. Unknown keys are rejected and
/// errors carry the offending line.
ExperimentSpec parse_spec(const std::string& path);
ExperimentSpec parse_spec_string(const std::string& text, const std::string& base_dir = ".");

}  // namespace acmtm
