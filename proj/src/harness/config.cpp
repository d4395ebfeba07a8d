#include "clockdil/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "clockdil/harness/expression.hpp"

namespace clockdil::harness {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Config, fmt::format("{}: {}", field, what));
}

// Reads typed keys from one INI section and remembers which keys were used.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) tree_ = *child;
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    auto v = tree_.get_optional<std::string>(key);
    if (!v) return std::nullopt;
    boost::algorithm::trim(*v);
    return *v;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    auto v = text(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        const std::string s = boost::algorithm::to_lower_copy(*v);
        if (s == "true" || s == "yes" || s == "1") out = true;
        else if (s == "false" || s == "no" || s == "0") out = false;
        else throw boost::bad_lexical_cast();
      } else if constexpr (std::is_unsigned_v<T>) {
        if (v->find('-') != std::string::npos) throw boost::bad_lexical_cast();
        out = boost::lexical_cast<T>(*v);
      } else {
        out = boost::lexical_cast<T>(*v);
      }
    } catch (const boost::bad_lexical_cast&) {
      fail(path(key), fmt::format("cannot read '{}'", *v));
    }
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!tree_.get_optional<std::string>(key)) {
      used_.insert(key);
      return;
    }
    T value{};
    read(key, value);
    out = value;
  }

  void read_expression(const std::string& key, std::string& out, const std::string& variable) {
    auto v = text(key);
    if (!v) return;
    try {
      Expression::parse(*v, variable);
    } catch (const Error& e) {
      fail(path(key), e.what());
    }
    out = *v;
  }

  // Keys starting with prefix, e.g. term1, term2, in file order.
  std::vector<std::pair<std::string, std::string>> with_prefix(const std::string& prefix) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : tree_)
      if (boost::algorithm::starts_with(k, prefix)) {
        used_.insert(k);
        out.emplace_back(k, boost::algorithm::trim_copy(v.data()));
      }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : tree_)
      if (!used_.count(k)) fail(path(k), "unknown key");
  }

 private:
  std::string name_;
  pt::ptree tree_;
  std::set<std::string> used_;
};

ExperimentKind parse_kind(const std::string& s, const std::string& field) {
  static const std::map<std::string, ExperimentKind> kinds{
      {"hamiltonian2lvl", ExperimentKind::Hamiltonian2Level},
      {"open-ode", ExperimentKind::OpenOde},
      {"fokker-planck", ExperimentKind::FokkerPlanck},
      {"omega-sweep", ExperimentKind::OmegaSweep},
      {"commuting-appendixA", ExperimentKind::CommutingProtocol},
      {"consistency", ExperimentKind::Consistency},
      {"complexity", ExperimentKind::Complexity},
      {"pde", ExperimentKind::Pde},
  };
  auto it = kinds.find(s);
  if (it == kinds.end()) fail(field, fmt::format("unknown experiment '{}'", s));
  return it->second;
}

ClockScheme parse_scheme(const std::string& s, const std::string& field) {
  if (s == "galerkin") return ClockScheme::Galerkin;
  if (s == "spectral") return ClockScheme::Spectral;
  if (s == "upwind") return ClockScheme::Upwind;
  fail(field, fmt::format("unknown clock '{}' (galerkin, spectral, upwind)", s));
}

ClockKind parse_clock_state(const std::string& s, const std::string& field) {
  if (s == "pure") return ClockKind::PureSqrtDelta;
  if (s == "mixed") return ClockKind::MixedDiagonal;
  if (s == "uniform") return ClockKind::Uniform;
  fail(field, fmt::format("unknown clock state '{}' (pure, mixed, uniform)", s));
}

std::vector<std::string> split_list(const std::string& text, const char* sep = ",") {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(sep));
  for (auto& p : parts) boost::algorithm::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

// "order, axis, time expression, space expression"
PdeTerm parse_term(const std::string& text, const std::string& field, bool potential) {
  const auto parts = split_list(text, ";");
  PdeTerm t;
  std::size_t k = 0;
  try {
    if (!potential) {
      if (parts.size() != 4) fail(field, "expected 'order; axis; time expression; space expression'");
      t.order = boost::lexical_cast<unsigned>(parts[0]);
      t.axis = boost::lexical_cast<std::size_t>(parts[1]);
      if (t.axis == 0) fail(field, "axes are numbered from 1");
      t.axis -= 1;
      k = 2;
    } else if (parts.size() != 2) {
      fail(field, "expected 'time expression; space expression'");
    }
  } catch (const boost::bad_lexical_cast&) {
    fail(field, "order and axis must be integers");
  }
  t.time_expr = parts[k];
  t.space_expr = parts[k + 1];
  try {
    Expression::parse(t.time_expr, "t");
    Expression::parse(t.space_expr, "x");
  } catch (const Error& e) {
    fail(field, e.what());
  }
  return t;
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Hamiltonian2Level: return "hamiltonian2lvl";
    case ExperimentKind::OpenOde: return "open-ode";
    case ExperimentKind::FokkerPlanck: return "fokker-planck";
    case ExperimentKind::OmegaSweep: return "omega-sweep";
    case ExperimentKind::CommutingProtocol: return "commuting-appendixA";
    case ExperimentKind::Consistency: return "consistency";
    case ExperimentKind::Complexity: return "complexity";
    case ExperimentKind::Pde: return "pde";
  }
  return "?";
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  for (const auto& p : split_list(text)) {
    try {
      out.push_back(boost::lexical_cast<double>(p));
    } catch (const boost::bad_lexical_cast&) {
      fail(field, fmt::format("'{}' is not a number", p));
    }
  }
  if (out.empty()) fail(field, "empty list");
  return out;
}

EvolveMethod parse_method(const std::string& s, const std::string& field) {
  if (s == "auto") return EvolveMethod::Auto;
  if (s == "dense") return EvolveMethod::DenseEig;
  if (s == "krylov") return EvolveMethod::Krylov;
  fail(field, fmt::format("unknown method '{}' (auto, dense, krylov)", s));
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, fmt::format("line {}: {}", e.line(), e.message()));
  }
  static const std::set<std::string> sections{"experiment", "numerics", "physics", "pde", "output", "assert"};
  for (const auto& [k, v] : root) {
    if (!sections.count(k)) fail(k, "unknown section");
    if (v.empty() && !v.data().empty()) fail(k, "key outside a section");
  }

  ExperimentConfig c;
  {
    Section s(root, "experiment");
    auto type = s.text("type");
    if (!type) fail(s.path("type"), "required");
    c.kind = parse_kind(*type, s.path("type"));
    c.name = std::string(experiment_name(c.kind));
    s.read("name", c.name);
    s.read("full", c.full);
    s.reject_unknown();
  }
  {
    Section s(root, "numerics");
    Numerics& n = c.numerics;
    s.read("N_s", n.n_s);
    s.read("scale_s", n.scale_s);
    s.read("N_eta", n.n_eta);
    s.read("scale_eta", n.scale_eta);
    s.read("N_u", n.n_u);
    s.read("scale_u", n.scale_u);
    if (auto v = s.text("clock")) n.clock = parse_scheme(*v, s.path("clock"));
    if (auto v = s.text("clock_state")) n.clock_state = parse_clock_state(*v, s.path("clock_state"));
    if (auto v = s.text("profile")) {
      try {
        n.profile = parse_profile(*v);
      } catch (const Error& e) {
        fail(s.path("profile"), e.what());
      }
    }
    if (auto v = s.text("omega")) n.omegas = parse_number_list(*v, s.path("omega"));
    if (auto v = s.text("method")) n.method = parse_method(*v, s.path("method"));
    s.read("krylov_tol", n.krylov_tol);
    s.read("strict_resolution", n.strict_resolution);
    s.read("recovery_a", n.recovery_a);
    s.read("recovery_b", n.recovery_b);
    s.read("workers", n.workers);
    s.reject_unknown();
  }
  {
    Section s(root, "physics");
    Physics& p = c.physics;
    s.read("a", p.a);
    s.read_expression("g", p.g, "s");
    s.read_expression("beta", p.beta, "s");
    s.read("case", p.fp_case);
    s.read("T", p.t_final);
    s.read("times", p.time_points);
    if (auto v = s.text("observables")) p.observables = split_list(*v);
    s.read("initial_mean", p.initial_mean);
    s.read("initial_variance", p.initial_variance);
    s.reject_unknown();
  }
  {
    Section s(root, "pde");
    Physics& p = c.physics;
    s.read("dim", p.pde_dim);
    for (const auto& [k, v] : s.with_prefix("term")) p.pde_terms.push_back(parse_term(v, s.path(k), false));
    if (auto v = s.text("potential")) p.pde_potential = parse_term(*v, s.path("potential"), true);
    s.reject_unknown();
  }
  {
    Section s(root, "output");
    if (auto v = s.text("csv")) c.output.csv = *v;
    if (auto v = s.text("json")) c.output.json = *v;
    s.read("seed", c.output.seed);
    s.read("timing", c.output.timing);
    s.reject_unknown();
  }
  {
    Section s(root, "assert");
    Assertions& a = c.checks;
    s.read("max_abs_err", a.max_abs_err);
    s.read("min_fidelity", a.min_fidelity);
    s.read("slope_min", a.slope_min);
    s.read("slope_max", a.slope_max);
    s.read("prefactor_tol", a.prefactor_tol);
    s.read("fit_omega_min", a.fit_omega_min);
    s.read("fit_omega_max", a.fit_omega_max);
    s.reject_unknown();
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot open config '{}'", path.string()));
  try {
    return parse_config(in);
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.omegas) c.numerics.omegas = *o.omegas;
  if (o.full) c.full = true;
  if (c.full && c.kind == ExperimentKind::FokkerPlanck) {
    c.numerics.n_s = 128;
    c.numerics.n_eta = 128;
    c.numerics.n_u = 64;
    c.numerics.method = EvolveMethod::Krylov;
  }
  if (o.method) c.numerics.method = *o.method;
  if (o.out_dir) {
    if (c.output.csv.empty()) c.output.csv = c.name + ".csv";
    if (c.output.json.empty()) c.output.json = c.name + ".json";
    c.output.csv = *o.out_dir / c.output.csv.filename();
    c.output.json = *o.out_dir / c.output.json.filename();
  }
  validate(c);
}

void validate(const ExperimentConfig& c) {
  const Numerics& n = c.numerics;
  if (n.n_s < 2) fail("numerics.N_s", "must be at least 2");
  if (n.n_eta < 2) fail("numerics.N_eta", "must be at least 2");
  if (n.n_u < 2) fail("numerics.N_u", "must be at least 2");
  for (auto [v, f] : {std::pair{n.scale_s, "numerics.scale_s"}, std::pair{n.scale_eta, "numerics.scale_eta"},
                      std::pair{n.scale_u, "numerics.scale_u"}})
    if (!(v > 0.0)) fail(f, "must be positive");
  if (n.omegas.empty()) fail("numerics.omega", "must not be empty");
  for (double w : n.omegas)
    if (!(w > 0.0)) fail("numerics.omega", "widths must be positive");
  if (!(n.krylov_tol > 0.0)) fail("numerics.krylov_tol", "must be positive");
  if (!(n.recovery_a < n.recovery_b)) fail("numerics.recovery_b", "must exceed recovery_a");
  if (!(c.physics.t_final > 0.0)) fail("physics.T", "must be positive");
  if (c.physics.time_points < 1) fail("physics.times", "must be at least 1");
  if (c.physics.fp_case < 0 || c.physics.fp_case > 3) fail("physics.case", "must be 1, 2 or 3");
  if (c.kind == ExperimentKind::FokkerPlanck && !(c.physics.initial_variance > 0.0))
    fail("physics.initial_variance", "must be positive");
  if (c.kind == ExperimentKind::OmegaSweep && n.omegas.size() < 3)
    fail("numerics.omega", "a sweep needs at least three widths");
  if (c.kind == ExperimentKind::Pde) {
    if (c.physics.pde_dim != 1) fail("pde.dim", "simulation supports dim = 1");
    if (c.physics.pde_terms.empty() && !c.physics.pde_potential) fail("pde.term1", "no terms given");
    for (const auto& t : c.physics.pde_terms)
      if (t.axis >= c.physics.pde_dim) fail("pde.term", "axis out of range");
  }
  if (c.kind == ExperimentKind::Complexity && n.clock != ClockScheme::Upwind)
    fail("numerics.clock", "complexity reports use the upwind clock");
  if ((c.checks.slope_min || c.checks.slope_max || c.checks.prefactor_tol) &&
      c.kind != ExperimentKind::OmegaSweep && c.kind != ExperimentKind::Hamiltonian2Level)
    fail("assert.slope_min", "fit assertions need an omega sweep");
}

}  // namespace clockdil::harness
