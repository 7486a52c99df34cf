#include "acmtm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "acmtm/kernels.hpp"

namespace acmtm {

ChainRun run_chain(const TargetModel& target, const SamplerSpec& sampler, const StateVector& x0,
                   std::int64_t iterations, std::int64_t burn_in, std::uint64_t seed,
                   std::uint64_t stream_id) {
  if (iterations < 1) throw InvalidParameter("run_chain: iterations must be positive");
  if (x0.size() != target.dim()) throw InvalidParameter("run_chain: initial state dimension mismatch");
  if (target.log_density(x0) == -std::numeric_limits<double>::infinity())
    throw InvalidParameter("run_chain: initial state has zero target density");

  const Index d = target.dim();
  ScaleGrid grid = build_initial_grid(sampler, d);
  if (grid.dim() != d) throw InvalidParameter("run_chain: grid rows differ from target dimension");
  KernelConfig cfg;
  cfg.alpha = sampler.alpha;
  cfg.validate();

  RngStream rng = make_stream(seed, stream_id);
  std::optional<AdaptationState> adapt;
  if (sampler.kind == SamplerKind::Acmtm)
    adapt.emplace(d, grid.proposals(), make_stream(seed, stream_id ^ kAdaptationStreamBit),
                  sampler.beta, sampler.bounds);
  std::optional<AcmhState> acmh;
  Eigen::VectorXd cmh_scales = grid.matrix().col(0);
  if (sampler.kind == SamplerKind::Acmh) {
    acmh.emplace(d);
    acmh->batch_size = sampler.acmh_batch;
    acmh->target_rate = sampler.acmh_target;
    acmh->bounds = sampler.bounds;
  }

  ChainRun run{.trace = {}, .final_grid = grid, .events = {}};
  ChainTrace& trace = run.trace;
  trace.initial_state = x0;
  trace.states.resize(iterations, d);
  trace.records.reserve(static_cast<std::size_t>(iterations));
  trace.burn_in = burn_in;

  StateVector x = x0;
  const auto start = std::chrono::steady_clock::now();
  for (std::int64_t t = 1; t <= iterations; ++t) {
    SweepRecord rec;
    switch (sampler.kind) {
      case SamplerKind::Cmh:
      case SamplerKind::Acmh:
        rec = cmh_sweep(target, x, cmh_scales, rng);
        break;
      case SamplerKind::MixtureCmh:
        rec = mixture_cmh_sweep(target, x, grid, rng);
        break;
      case SamplerKind::Cmtm:
      case SamplerKind::Acmtm:
        rec = cmtm_sweep(target, x, grid, cfg, rng);
        break;
    }
    x = std::move(rec.state_after);
    rec.state_after.resize(0);
    trace.states.row(t - 1) = x.transpose();

    if (adapt) {
      adapt->record_sweep(rec);
      auto outcome = maybe_adapt(*adapt, grid, t);
      run.events.insert(run.events.end(), outcome.events.begin(), outcome.events.end());
    } else if (acmh) {
      acmh->record_sweep(rec, cmh_scales);
    }
    trace.records.push_back(std::move(rec));
  }
  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  run.final_grid = sampler.uses_grid() ? grid : ScaleGrid(Eigen::MatrixXd(cmh_scales));
  trace.validate();
  return run;
}

ReplicateResult run_experiment(const ExperimentSpec& spec, Index replicate_id) {
  spec.validate();
  if (replicate_id < 0) throw InvalidParameter("replicate id must be non-negative");
  const TargetModel target = build_target(spec.target);
  const StateVector x0 = spec.initial_state ? *spec.initial_state : target.initial_state();

  ChainRun run = run_chain(target, spec.sampler, x0, spec.iterations, spec.burn_in, spec.base_seed,
                           static_cast<std::uint64_t>(replicate_id));
  const Index m = spec.sampler.uses_grid() ? spec.sampler.proposals : 1;

  ReplicateResult out{.replicate = replicate_id,
                      .report = diagnose(run.trace, m),
                      .final_grid = run.final_grid,
                      .events = std::move(run.events),
                      .wall_time = run.trace.wall_time,
                      .thinned_trace = {}};
  if (spec.region)
    out.report.region_tables =
        region_frequency_tables(run.trace, m, spec.region->coordinate, spec.region->threshold);
  if (spec.full_trace) {
    const Index n = run.trace.iterations();
    const Index rows = (n + spec.thin - 1) / spec.thin;
    out.thinned_trace.resize(rows, target.dim() + 1);
    for (Index r = 0; r < rows; ++r) {
      const Index i = r * spec.thin;
      out.thinned_trace(r, 0) = static_cast<double>(i + 1);
      out.thinned_trace.row(r).tail(target.dim()) = run.trace.states.row(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

MetricSummary summarize(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (!std::isnan(x)) v.push_back(x);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty()) return {nan, nan, nan, nan};
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double sum = 0.0;
  for (double x : v) sum += x;
  return {v.front(), median, sum / static_cast<double>(n), v.back()};
}

Eigen::VectorXd ReplicateReport::mean_act() const {
  Eigen::VectorXd out(dim());
  for (Index k = 0; k < dim(); ++k) out[k] = act[static_cast<std::size_t>(k)].mean;
  return out;
}

Eigen::VectorXd ReplicateReport::mean_ess() const {
  Eigen::VectorXd out(dim());
  for (Index k = 0; k < dim(); ++k) out[k] = ess[static_cast<std::size_t>(k)].mean;
  return out;
}

ReplicateReport aggregate(std::vector<ReplicateResult> results) {
  if (results.empty()) throw InvalidParameter("aggregate: no replicates");
  ReplicateReport rep;
  const Index d = results.front().report.act.size();
  std::vector<double> asj, wall;
  std::vector<std::vector<double>> act(static_cast<std::size_t>(d)), ess(static_cast<std::size_t>(d));
  for (const auto& r : results) {
    if (r.report.act.size() != d) throw InvalidParameter("aggregate: replicates differ in dimension");
    asj.push_back(r.report.asj);
    wall.push_back(r.wall_time);
    for (Index k = 0; k < d; ++k) {
      act[static_cast<std::size_t>(k)].push_back(r.report.act[k]);
      ess[static_cast<std::size_t>(k)].push_back(r.report.ess[k]);
    }
  }
  rep.asj = summarize(asj);
  rep.wall_time = summarize(wall);
  for (Index k = 0; k < d; ++k) {
    rep.act.push_back(summarize(act[static_cast<std::size_t>(k)]));
    rep.ess.push_back(summarize(ess[static_cast<std::size_t>(k)]));
  }
  rep.replicates = std::move(results);
  return rep;
}

ReplicateFailure::ReplicateFailure(std::vector<ReplicateResult> completed_,
                                   std::vector<std::pair<Index, std::string>> failures_)
    : std::runtime_error(std::to_string(failures_.size()) + " replicate(s) failed; first: " +
                         (failures_.empty() ? std::string("?") : failures_.front().second)),
      completed(std::move(completed_)),
      failures(std::move(failures_)) {}

ReplicateReport run_replicates(const ExperimentSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.replicates);
  std::vector<std::optional<ReplicateResult>> slots(n);
  std::vector<std::pair<Index, std::string>> failures;
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = run_experiment(spec, static_cast<Index>(i));
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        failures.emplace_back(static_cast<Index>(i), e.what());
      }
    }
  };
  const auto width = std::min<std::size_t>(static_cast<std::size_t>(spec.threads), n);
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
  }

  std::vector<ReplicateResult> done;
  for (auto& s : slots)
    if (s) done.push_back(std::move(*s));
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    throw ReplicateFailure(std::move(done), std::move(failures));
  }
  return aggregate(std::move(done));
}

std::vector<AlphaSweepRow> alpha_sweep(const ExperimentSpec& spec, const std::vector<double>& alphas,
                                       Index replicate_id) {
  if (spec.sampler.kind != SamplerKind::Cmtm) throw InvalidParameter("alpha sweep needs a cmtm sampler");
  if (alphas.empty()) throw InvalidParameter("alpha sweep needs at least one alpha");
  std::vector<AlphaSweepRow> rows;
  for (double a : alphas) {
    ExperimentSpec s = spec;
    s.sampler.alpha = a;
    s.alpha_sweep.clear();
    const auto r = run_experiment(s, replicate_id);
    rows.push_back({a, r.report.asj, r.report.act});
  }
  return rows;
}

}  // namespace acmtm
