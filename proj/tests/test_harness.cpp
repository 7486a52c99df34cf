#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "acmtm/report.hpp"
#include "acmtm/runner.hpp"
#include "acmtm/spec.hpp"

using namespace acmtm;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
target:
  family: gaussian_mixture
  preset: mixture4d
sampler:
  kind: cmtm
  proposals: 5
iterations: 400
)";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("acmtm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the wall_time column (third field) of summary.csv and the wall_time row of aggregate.csv.
std::string mask_wall_time(const fs::path& p) {
  std::stringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("wall_time", 0) == 0) continue;
    if (p.filename() == "summary.csv") {
      const auto a = line.find(',', line.find(',') + 1);
      const auto b = line.find(',', a + 1);
      line.erase(a, b - a);
    }
    out += line + '\n';
  }
  return out;
}

int line_of_error(const std::string& yaml) {
  try {
    parse_spec_string(yaml);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal spec parses with defaults") {
  const auto s = parse_spec_string(kMinimal);
  CHECK(s.target.family == TargetFamily::GaussianMixture);
  CHECK(s.target.mixture.dim() == 4);
  CHECK(s.sampler.kind == SamplerKind::Cmtm);
  CHECK(s.sampler.proposals == 5);
  CHECK(s.sampler.alpha == 2.9);
  CHECK(s.iterations == 400);
  CHECK(s.burn_in == 200);
  CHECK(s.replicates == 1);
}

TEST_CASE("generic grid for m = 20") {
  SamplerSpec s;
  s.proposals = 20;
  const auto g = build_initial_grid(s, 4);
  for (Index j = 0; j < 20; ++j) CHECK(g(3, j) == std::ldexp(1.0, static_cast<int>(j) - 10));
}

TEST_CASE("validation errors carry a line") {
  CHECK(line_of_error(std::string(kMinimal) + "burn_in: 400\n") == 9);
  CHECK(line_of_error(std::string(kMinimal) + "burn_in: 900\n") == 9);
  CHECK(line_of_error(std::string(kMinimal) + "colour: blue\n") == 9);
  CHECK(line_of_error(R"(
target:
  family: banana
  wobble: 3
sampler:
  kind: cmh
)") == 4);
  CHECK(line_of_error(R"(
target:
  family: gaussian_mixture
  preset: mixture4d
sampler:
  kind: gibbs
)") == 6);
  CHECK(line_of_error(R"(
target: {family: vcm, a1: -1}
sampler: {kind: cmh}
)") == 2);
  CHECK(line_of_error("target: [unclosed\n") >= 1);
  CHECK_THROWS_AS(parse_spec("/nonexistent/spec.yaml"), ConfigError);
}

TEST_CASE("region and explicit grids") {
  const auto s = parse_spec_string(R"(
target: {family: gaussian_mixture, preset: mixture4d}
sampler:
  kind: cmtm
  grid:
    rows: [[1, 2], [1, 3], [1, 4], [1, 5]]
region: {coordinate: 2, threshold: 8}
)");
  CHECK(s.sampler.proposals == 2);
  CHECK(s.region->coordinate == 1);
  CHECK(build_initial_grid(s.sampler, 4)(2, 1) == 4.0);
}

TEST_CASE("run_experiment shape and determinism") {
  auto spec = parse_spec_string(kMinimal);
  const auto a = run_experiment(spec, 3);
  CHECK(a.report.act.size() == 4);
  CHECK(a.report.tables.selection.cols() == 5);
  const auto b = run_experiment(spec, 3);
  CHECK(a.report.asj == b.report.asj);
  CHECK(a.report.act == b.report.act);
  CHECK(run_experiment(spec, 4).report.asj != a.report.asj);
}

TEST_CASE("byte-identical artifacts across runs and thread counts") {
  auto spec = parse_spec_string(std::string(kMinimal) + "replicates: 3\nfull_trace: true\nthin: 7\n");
  spec.sampler.kind = SamplerKind::Acmtm;
  spec.sampler.beta = 20;
  spec.region = RegionSpec{1, 8.0};

  auto write_all = [&](const fs::path& dir, int threads) {
    spec.threads = threads;
    const auto rep = run_replicates(spec);
    for (const auto& r : rep.replicates)
      write_replicate_files(dir / fmt::format("replicate_{:03}", r.replicate), spec, r);
    write_summary(dir, rep);
  };
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  write_all(d1, 1);
  write_all(d2, 3);

  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(d1)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), d1);
    REQUIRE(fs::exists(d2 / rel));
    const bool timed = rel.filename() == "summary.csv" || rel.filename() == "aggregate.csv";
    if (timed)
      CHECK(mask_wall_time(e.path()) == mask_wall_time(d2 / rel));
    else
      CHECK(slurp(e.path()) == slurp(d2 / rel));
    ++compared;
  }
  CHECK(compared == 2 + 3 * 9);
  CHECK(slurp(d1 / "summary.csv").rfind("replicate,asj,wall_time,act_1,act_2,act_3,act_4,ess_1", 0) == 0);
  CHECK(slurp(d1 / "replicate_000" / "adaptation_log.csv")
            .rfind("iteration,coordinate,branch,sigma_min_old,sigma_min_new,sigma_max_old,sigma_max_new\n", 0) == 0);
  CHECK(slurp(d1 / "replicate_000" / "selection.csv").rfind("coordinate,proposal,sigma,frequency\n", 0) == 0);
  CHECK(slurp(d1 / "replicate_000" / "final_grid.csv").rfind("coordinate,proposal,sigma\n", 0) == 0);
}

TEST_CASE("aggregation") {
  const auto s = summarize({3.0, 1.0, std::nan(""), 2.0, 10.0});
  CHECK(s.min == 1.0);
  CHECK(s.median == 2.5);
  CHECK(s.mean == 4.0);
  CHECK(s.max == 10.0);

  auto spec = parse_spec_string(kMinimal);
  const auto one = run_replicates(spec);
  const auto single = run_experiment(spec, 0);
  CHECK(one.replicates.size() == 1);
  CHECK(one.asj.min == single.report.asj);
  CHECK(one.asj.median == single.report.asj);
  CHECK(one.asj.max == single.report.asj);
  CHECK(one.mean_act() == single.report.act);

  spec.replicates = 5;
  const auto many = run_replicates(spec);
  CHECK(many.replicates.size() == 5);
  for (const auto& m : many.act) {
    CHECK(m.min <= m.median);
    CHECK(m.median <= m.max);
    CHECK(m.min <= m.mean);
    CHECK(m.mean <= m.max);
  }
}

TEST_CASE("replicate failures are collected") {
  auto spec = parse_spec_string(kMinimal);
  spec.replicates = 2;
  spec.initial_state = Eigen::Vector4d(1e7, 0, 0, 0);  // outside the support box
  try {
    run_replicates(spec);
    FAIL("expected failure");
  } catch (const ReplicateFailure& f) {
    CHECK(f.failures.size() == 2);
    const auto dir = scratch("manifest");
    write_manifest(dir, f, 2);
    CHECK(slurp(dir / "manifest.csv").find("1,failed,") != std::string::npos);
  }
}

TEST_CASE("alpha sweep") {
  auto spec = parse_spec_string(kMinimal);
  const auto rows = alpha_sweep(spec, {2.9});
  CHECK(rows.size() == 1);
  CHECK(rows[0].asj == run_experiment(spec, 0).report.asj);
  spec.sampler.kind = SamplerKind::MixtureCmh;
  CHECK_THROWS_AS(alpha_sweep(spec, {1.0}), InvalidParameter);
}

TEST_CASE("comparison reports") {
  auto spec = parse_spec_string(std::string(kMinimal) + "replicates: 2\n");
  const auto dir = scratch("compare");
  write_summary(dir / "a", run_replicates(spec));
  const auto a = read_summary(dir / "a" / "summary.csv");
  CHECK(a.dim() == 4);
  CHECK(a.ess.size() == 2);

  const auto rows = compare_reports({a, a}, {"x", "y"});
  CHECK(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.ess_ratio == 1.0);
    CHECK(r.ess_per_second_ratio == 1.0);
  }

  auto banana = parse_spec_string("target: {family: banana, dim: 3}\nsampler: {kind: cmh}\niterations: 100\n");
  write_summary(dir / "b", run_replicates(banana));
  CHECK_THROWS_AS(compare_reports({a, read_summary(dir / "b" / "summary.csv")}, {"x", "y"}), InvalidParameter);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  {
    std::ofstream(dir / "ok.yaml") << kMinimal << "outputs: " << (dir / "out").string() << "\n";
    std::ofstream(dir / "bad.yaml") << kMinimal << "bogus: 1\n";
  }
  auto run = [&](const std::string& args) {
    const int status = std::system((std::string(ACMTM_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("validate " + (dir / "ok.yaml").string()) == 0);
  CHECK(run("validate " + (dir / "bad.yaml").string()) == 2);
  CHECK(run("run " + (dir / "bad.yaml").string()) == 2);
  CHECK(run("run " + (dir / "ok.yaml").string() + " --seed 9 --full-trace --thin 50") == 0);
  CHECK(fs::exists(dir / "out" / "replicate_000" / "trace.csv"));
  CHECK(fs::exists(dir / "out" / "summary.csv"));
  CHECK(run("compare " + (dir / "out").string() + " " + (dir / "out").string() + " -o " +
            (dir / "cmp.csv").string()) == 0);
  CHECK(run("compare " + (dir / "missing").string()) == 3);
  CHECK(run("frobnicate") == 1);
}

}
