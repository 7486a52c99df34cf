#include "acmtm/spec.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace acmtm {

std::string_view to_string(TargetFamily f) {
  switch (f) {
    case TargetFamily::GaussianMixture: return "gaussian_mixture";
    case TargetFamily::Banana: return "banana";
    case TargetFamily::Vcm: return "vcm";
  }
  return "unknown";
}

std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Cmh: return "cmh";
    case SamplerKind::MixtureCmh: return "mixture_cmh";
    case SamplerKind::Cmtm: return "cmtm";
    case SamplerKind::Acmtm: return "acmtm";
    case SamplerKind::Acmh: return "acmh";
  }
  return "unknown";
}

TargetModel build_target(const TargetSpec& spec) {
  switch (spec.family) {
    case TargetFamily::GaussianMixture:
      return make_gaussian_mixture(spec.mixture,
                                   SupportBox::symmetric(spec.mixture.dim(), spec.support_half_width));
    case TargetFamily::Banana:
      return make_banana(spec.banana, SupportBox::symmetric(spec.banana.dim, spec.support_half_width));
    case TargetFamily::Vcm:
      return make_vcm(spec.vcm, SupportBox::symmetric(spec.vcm.dim(), spec.support_half_width));
  }
  throw InvalidParameter("unknown target family");
}

ScaleGrid build_initial_grid(const SamplerSpec& spec, Index dim) {
  if (!spec.uses_grid()) return ScaleGrid(Eigen::MatrixXd::Constant(dim, 1, spec.scale));
  if (spec.grid) {
    if (spec.grid->rows() == 1) return ScaleGrid(spec.grid->replicate(dim, 1));
    return ScaleGrid(*spec.grid);
  }
  return ScaleGrid::generic(dim, spec.proposals);
}

// ---------------------------------------------------------------------------

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void require_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) throw ConfigError(what + " must be a mapping", line_of(n));
}

void check_keys(const YAML::Node& n, const std::string& section,
                std::initializer_list<std::string_view> allowed) {
  require_map(n, section);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + section, line_of(kv.first));
  }
}

template <typename T>
T read(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value for '" + key + "'", line_of(n));
  }
}

template <typename T>
void read_optional(const YAML::Node& parent, const char* key, T& out) {
  if (const auto n = parent[key]) out = read<T>(n, key);
}

Eigen::VectorXd read_vector(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError("'" + key + "' must be a list of numbers", line_of(n));
  const auto v = read<std::vector<double>>(n, key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

Eigen::MatrixXd read_matrix(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() == 0)
    throw ConfigError("'" + key + "' must be a non-empty list of rows", line_of(n));
  std::vector<Eigen::VectorXd> rows;
  for (const auto& r : n) rows.push_back(read_vector(r, key));
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw ConfigError("'" + key + "' has ragged rows", line_of(n));
    m.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  return m;
}

TargetSpec parse_target(const YAML::Node& n, const std::string& base_dir) {
  require_map(n, "target");
  TargetSpec t;
  const auto family = n["family"];
  if (!family) throw ConfigError("target.family is required", line_of(n));
  const auto name = read<std::string>(family, "family");

  if (name == "gaussian_mixture") {
    t.family = TargetFamily::GaussianMixture;
    check_keys(n, "target", {"family", "preset", "weights", "means", "variances", "support_half_width"});
    if (const auto p = n["preset"]) {
      const auto preset = read<std::string>(p, "preset");
      if (preset == "mixture2d") t.mixture = mixture_2d_spec();
      else if (preset == "mixture4d") t.mixture = mixture_4d_spec();
      else if (preset == "mixture20d") t.mixture = mixture_20d_spec();
      else throw ConfigError("unknown mixture preset '" + preset + "'", line_of(p));
      if (n["weights"] || n["means"] || n["variances"])
        throw ConfigError("give either a preset or explicit weights/means/variances", line_of(p));
    } else {
      if (!n["weights"] || !n["means"] || !n["variances"])
        throw ConfigError("mixture needs preset or weights, means and variances", line_of(n));
      t.mixture.weights = read_vector(n["weights"], "weights");
      t.mixture.means = read_matrix(n["means"], "means");
      t.mixture.variances = read_matrix(n["variances"], "variances");
    }
    try {
      t.mixture.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what(), line_of(n));
    }
  } else if (name == "banana") {
    t.family = TargetFamily::Banana;
    check_keys(n, "target", {"family", "B", "dim", "support_half_width"});
    read_optional(n, "B", t.banana.B);
    read_optional(n, "dim", t.banana.dim);
    if (t.banana.dim < 2) throw ConfigError("banana dim must be at least 2", line_of(n));
    if (!(t.banana.B >= 0.0)) throw ConfigError("banana B must be non-negative", line_of(n));
  } else if (name == "vcm") {
    t.family = TargetFamily::Vcm;
    check_keys(n, "target", {"family", "data", "a1", "b1", "a2", "b2", "mu0", "sigma0_sq",
                             "support_half_width"});
    t.vcm = dyestuff_vcm_spec();
    if (const auto d = n["data"]) {
      const auto src = read<std::string>(d, "data");
      if (src != "builtin") {
        const auto path = std::filesystem::path(src).is_absolute()
                              ? std::filesystem::path(src)
                              : std::filesystem::path(base_dir) / src;
        try {
          t.vcm.data = load_matrix_text(path.string());
        } catch (const InvalidParameter& e) {
          throw ConfigError(e.what(), line_of(d));
        }
      }
    }
    read_optional(n, "a1", t.vcm.a1);
    read_optional(n, "b1", t.vcm.b1);
    read_optional(n, "a2", t.vcm.a2);
    read_optional(n, "b2", t.vcm.b2);
    read_optional(n, "mu0", t.vcm.mu0);
    read_optional(n, "sigma0_sq", t.vcm.sigma0_sq);
    try {
      t.vcm.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what(), line_of(n));
    }
  } else {
    throw ConfigError("unknown target family '" + name + "'", line_of(family));
  }
  read_optional(n, "support_half_width", t.support_half_width);
  if (!(t.support_half_width > 0.0))
    throw ConfigError("support_half_width must be positive", line_of(n));
  return t;
}

SamplerSpec parse_sampler(const YAML::Node& n) {
  check_keys(n, "sampler", {"kind", "proposals", "alpha", "grid", "scale", "adaptation", "acmh"});
  SamplerSpec s;
  const auto kind = n["kind"];
  if (!kind) throw ConfigError("sampler.kind is required", line_of(n));
  const auto name = read<std::string>(kind, "kind");
  if (name == "cmh") s.kind = SamplerKind::Cmh;
  else if (name == "mixture_cmh") s.kind = SamplerKind::MixtureCmh;
  else if (name == "cmtm") s.kind = SamplerKind::Cmtm;
  else if (name == "acmtm") s.kind = SamplerKind::Acmtm;
  else if (name == "acmh") s.kind = SamplerKind::Acmh;
  else throw ConfigError("unknown sampler kind '" + name + "'", line_of(kind));

  read_optional(n, "proposals", s.proposals);
  read_optional(n, "alpha", s.alpha);
  read_optional(n, "scale", s.scale);
  if (!(s.alpha > 0.0)) throw ConfigError("alpha must be positive", line_of(n));
  if (!(s.scale > 0.0)) throw ConfigError("scale must be positive", line_of(n));

  if (const auto g = n["grid"]) {
    if (g.IsScalar()) {
      if (read<std::string>(g, "grid") != "generic")
        throw ConfigError("grid must be 'generic', {scales: [...]} or {rows: [[...]]}", line_of(g));
    } else {
      check_keys(g, "sampler.grid", {"scales", "rows"});
      if (g["scales"] && g["rows"]) throw ConfigError("grid takes scales or rows, not both", line_of(g));
      if (g["scales"]) s.grid = read_vector(g["scales"], "scales").transpose();
      else if (g["rows"]) s.grid = read_matrix(g["rows"], "rows");
      else throw ConfigError("grid mapping needs scales or rows", line_of(g));
      if ((s.grid->array() <= 0.0).any() || !s.grid->allFinite())
        throw ConfigError("grid scales must be finite and positive", line_of(g));
      if (!n["proposals"]) s.proposals = s.grid->cols();
      if (s.grid->cols() != s.proposals)
        throw ConfigError("grid row length differs from proposals", line_of(g));
    }
  }

  if (const auto a = n["adaptation"]) {
    check_keys(a, "sampler.adaptation", {"beta", "epsilon", "upper"});
    read_optional(a, "beta", s.beta);
    read_optional(a, "epsilon", s.bounds.epsilon);
    read_optional(a, "upper", s.bounds.upper);
    if (s.beta < 1) throw ConfigError("adaptation.beta must be >= 1", line_of(a));
    try {
      s.bounds.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what(), line_of(a));
    }
  }
  if (const auto a = n["acmh"]) {
    check_keys(a, "sampler.acmh", {"batch_size", "target_rate"});
    read_optional(a, "batch_size", s.acmh_batch);
    read_optional(a, "target_rate", s.acmh_target);
    if (s.acmh_batch < 1) throw ConfigError("acmh.batch_size must be >= 1", line_of(a));
    if (!(s.acmh_target > 0.0 && s.acmh_target < 1.0))
      throw ConfigError("acmh.target_rate must be in (0, 1)", line_of(a));
  }

  if (s.proposals < 1) throw ConfigError("proposals (m) must be >= 1", line_of(n));
  if (!s.uses_grid() && s.proposals != 1)
    throw ConfigError("cmh and acmh use a single proposal; drop 'proposals'", line_of(n));
  return s;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (iterations < 1) throw ConfigError("iterations: must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ConfigError("burn_in: need iterations > burn_in >= 0");
  if (iterations - burn_in < 10) throw ConfigError("burn_in: need at least 10 post-burn-in iterations");
  if (replicates < 1) throw ConfigError("replicates: must be >= 1");
  if (threads < 1) throw ConfigError("threads: must be >= 1");
  if (thin < 1) throw ConfigError("thin: must be >= 1");
  if (sampler.proposals < 1) throw ConfigError("sampler: proposals (m) must be >= 1");

  const Index d = target.family == TargetFamily::GaussianMixture ? target.mixture.dim()
                  : target.family == TargetFamily::Banana        ? target.banana.dim
                                                                 : target.vcm.dim();
  if (sampler.grid && sampler.grid->rows() != 1 && sampler.grid->rows() != d)
    throw ConfigError("sampler: grid rows must number 1 or the target dimension");
  if (initial_state && initial_state->size() != d)
    throw ConfigError("initial_state: length differs from the target dimension");
  if (region && (region->coordinate < 0 || region->coordinate >= d))
    throw ConfigError("region: coordinate out of range");
  for (double a : alpha_sweep)
    if (!(a > 0.0)) throw ConfigError("alpha_sweep: values must be positive");
  if (!alpha_sweep.empty() && sampler.kind != SamplerKind::Cmtm)
    throw ConfigError("alpha_sweep: requires sampler kind cmtm");
}

ExperimentSpec parse_spec_string(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root || !root.IsMap()) throw ConfigError("experiment file must be a YAML mapping");
  check_keys(root, "experiment",
             {"name", "target", "sampler", "iterations", "burn_in", "replicates", "seed", "outputs",
              "threads", "thin", "full_trace", "initial_state", "region", "alpha_sweep"});

  ExperimentSpec spec;
  read_optional(root, "name", spec.name);
  if (!root["target"]) throw ConfigError("missing 'target' section");
  if (!root["sampler"]) throw ConfigError("missing 'sampler' section");
  spec.target = parse_target(root["target"], base_dir);
  spec.sampler = parse_sampler(root["sampler"]);

  read_optional(root, "iterations", spec.iterations);
  spec.burn_in = spec.iterations / 2;
  read_optional(root, "burn_in", spec.burn_in);
  read_optional(root, "replicates", spec.replicates);
  read_optional(root, "seed", spec.base_seed);
  read_optional(root, "outputs", spec.outputs);
  read_optional(root, "threads", spec.threads);
  read_optional(root, "thin", spec.thin);
  read_optional(root, "full_trace", spec.full_trace);
  if (const auto n = root["initial_state"]) spec.initial_state = read_vector(n, "initial_state");
  if (const auto n = root["region"]) {
    check_keys(n, "region", {"coordinate", "threshold"});
    if (!n["coordinate"] || !n["threshold"])
      throw ConfigError("region needs coordinate and threshold", line_of(n));
    RegionSpec r;
    r.coordinate = read<Index>(n["coordinate"], "coordinate") - 1;
    r.threshold = read<double>(n["threshold"], "threshold");
    spec.region = r;
  }
  if (const auto n = root["alpha_sweep"]) {
    const auto v = read_vector(n, "alpha_sweep");
    spec.alpha_sweep.assign(v.data(), v.data() + v.size());
  }

  try {
    spec.validate();
  } catch (const ConfigError& e) {
    // Messages lead with the top-level key they concern.
    const std::string msg = e.what();
    const auto key = msg.substr(0, msg.find(':'));
    const auto node = root[key];
    throw ConfigError(msg, node ? line_of(node) : 0);
  }
  return spec;
}

ExperimentSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_spec_string(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace acmtm
