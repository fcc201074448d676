#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace volcrit::cli {

using nlohmann::json;

std::string to_string(DirectionKind k) {
  switch (k) {
    case DirectionKind::tt_profile: return "tt_profile";
    case DirectionKind::parallel_tracefree: return "parallel_tracefree";
    case DirectionKind::conformal: return "conformal";
    case DirectionKind::custom_polynomial: return "custom_polynomial";
    case DirectionKind::radial_normal: return "radial_normal";
    case DirectionKind::tangential: return "tangential";
  }
  return "?";
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names{
      "critical-check", "linearization-check", "second-scalar-check", "tt-build",
      "second-variation", "saddle-demo", "large-ball-demo", "yamabe-path",
      "volume-chain", "eigen-check"};
  return names;
}

namespace {

// Reads members of one JSON object and remembers which keys were consumed, so
// that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), where(key));
  }

  template <typename T>
  void get_vector(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    const json& a = j_.at(key);
    if (!a.is_array()) fail(where(key), "expected an array");
    out.clear();
    for (std::size_t i = 0; i < a.size(); ++i)
      out.push_back(convert<T>(a[i], where(key) + "[" + std::to_string(i) + "]"));
  }

  ObjectReader child(const std::string& key) {
    seen_.insert(key);
    return ObjectReader(j_.at(key), where(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(where(k), "unknown key");
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(where, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(where, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) fail(where, "expected a non-negative integer");
      }
      return v.get<T>();
    } else {
      if (!v.is_number()) fail(where, "expected a number");
      return v.get<T>();
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) ObjectReader::fail(where, what);
}

void read_model(ObjectReader r, ModelSpec& m) {
  if (r.has("type")) {
    const std::string s = ObjectReader::convert<std::string>(r.raw("type"), r.where("type"));
    try {
      m.model = model_from_string(s);
    } catch (const std::exception&) {
      ObjectReader::fail(r.where("type"), "unknown model '" + s + "'");
    }
  }
  r.get("dim", m.dim);
  r.get("radius", m.radius);
  r.get("curvature_scale", m.curvature_scale);
  r.finish();
  require(m.dim >= 3 && m.dim <= kMaxDim, r.where("dim"), "must lie in [3, 6]");
  require(m.radius > 0, r.where("radius"), "must be positive");
  require(m.curvature_scale > 0, r.where("curvature_scale"), "must be positive");
}

DirectionKind kind_from_string(const std::string& s, const std::string& where) {
  for (DirectionKind k : {DirectionKind::tt_profile, DirectionKind::parallel_tracefree,
                          DirectionKind::conformal, DirectionKind::custom_polynomial,
                          DirectionKind::radial_normal, DirectionKind::tangential})
    if (to_string(k) == s) return k;
  ObjectReader::fail(where, "unknown direction kind '" + s + "'");
}

void read_direction(ObjectReader r, DirectionSpec& d, int dim) {
  require(r.has("kind"), r.where("kind"), "missing");
  d.kind = kind_from_string(ObjectReader::convert<std::string>(r.raw("kind"), r.where("kind")),
                            r.where("kind"));
  if (r.has("tt")) {
    ObjectReader t = r.child("tt");
    t.get("harmonic", d.tt.harmonic);
    t.get_vector("harmonic_matrix", d.tt.harmonic_matrix);
    t.get("r1", d.tt.r1);
    t.get("r2", d.tt.r2);
    t.get("amplitude", d.tt.amplitude);
    t.get("sharpness", d.tt.sharpness);
    t.get_vector("poly", d.tt.poly);
    t.finish();
    require(0 < d.tt.r1 && d.tt.r1 < d.tt.r2 && d.tt.r2 < 1, t.where("r1"),
            "need 0 < r1 < r2 < 1 (fractions of the outer radius)");
    require(d.tt.sharpness > 0, t.where("sharpness"), "must be positive");
  }
  r.get_vector("matrix", d.matrix);
  r.get_vector("coeffs", d.coeffs);
  if (r.has("terms")) {
    const json& a = r.raw("terms");
    if (!a.is_array()) ObjectReader::fail(r.where("terms"), "expected an array");
    for (std::size_t k = 0; k < a.size(); ++k) {
      ObjectReader t(a[k], r.where("terms") + "[" + std::to_string(k) + "]");
      PolynomialTerm term;
      t.get("i", term.i);
      t.get("j", term.j);
      t.get("coeff", term.coeff);
      std::vector<int> powers;
      t.get_vector("powers", powers);
      t.finish();
      require(term.i >= 0 && term.i < dim && term.j >= 0 && term.j < dim, t.where("i"),
              "component index out of range");
      require(static_cast<int>(powers.size()) <= dim, t.where("powers"), "more entries than dim");
      for (std::size_t p = 0; p < powers.size(); ++p) {
        require(powers[p] >= 0, t.where("powers"), "negative exponent");
        term.powers[p] = powers[p];
      }
      d.terms.push_back(term);
    }
  }
  r.finish();
  if (!d.matrix.empty())
    require(static_cast<int>(d.matrix.size()) == dim * dim, r.where("matrix"),
            "expected dim*dim entries");
  if (d.kind == DirectionKind::custom_polynomial)
    require(!d.terms.empty(), r.where("terms"), "custom_polynomial needs at least one term");
  require(!d.coeffs.empty(), r.where("coeffs"), "must not be empty");
}

void read_grid(ObjectReader r, GridSpec& g) {
  if (r.has("mode")) {
    const std::string s = ObjectReader::convert<std::string>(r.raw("mode"), r.where("mode"));
    if (s == "radial")
      g.mode = GridMode::radial;
    else if (s == "full")
      g.mode = GridMode::full;
    else
      ObjectReader::fail(r.where("mode"), "expected 'radial' or 'full'");
  }
  r.get("radial_modes", g.radial_modes);
  r.get("full_degree", g.full_degree);
  r.get("even_symmetry", g.even_symmetry);
  r.get("galerkin_radial", g.galerkin_orders.radial_nodes);
  r.get("galerkin_angular", g.galerkin_orders.angular_degree);
  r.get("newton_tolerance", g.newton_tolerance);
  r.get("max_iterations", g.max_iterations);
  r.finish();
  require(g.radial_modes >= 2, r.where("radial_modes"), "must be >= 2");
  require(g.full_degree >= 0, r.where("full_degree"), "must be >= 0");
  require(g.newton_tolerance > 0, r.where("newton_tolerance"), "must be positive");
  require(g.max_iterations >= 1, r.where("max_iterations"), "must be >= 1");
}

void read_tolerances(ObjectReader r, Tolerances& t) {
  r.get("critical_residual", t.critical_residual);
  r.get("linearization", t.linearization);
  r.get("second_scalar", t.second_scalar);
  r.get("tt_trace", t.tt_trace);
  r.get("tt_div", t.tt_div);
  r.get("path_first", t.path_first);
  r.get("path_second", t.path_second);
  r.get("rigidity", t.rigidity);
  r.get("eigen_euclidean", t.eigen_euclidean);
  r.get("eigen_hemisphere", t.eigen_hemisphere);
  r.get("order", t.order);
  r.get("doubling", t.doubling);
  r.finish();
}

}  // namespace

json config_echo(const ScenarioConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.description.empty()) j["description"] = c.description;
  j["model"] = {{"type", to_string(c.model.model)},
                {"dim", c.model.dim},
                {"radius", c.model.radius},
                {"curvature_scale", c.model.curvature_scale}};
  if (c.direction) {
    const DirectionSpec& d = *c.direction;
    json dj{{"kind", to_string(d.kind)}};
    if (d.kind == DirectionKind::tt_profile)
      dj["tt"] = {{"harmonic", d.tt.harmonic}, {"harmonic_matrix", d.tt.harmonic_matrix},
                  {"r1", d.tt.r1},             {"r2", d.tt.r2},
                  {"amplitude", d.tt.amplitude}, {"sharpness", d.tt.sharpness},
                  {"poly", d.tt.poly}};
    if (!d.matrix.empty()) dj["matrix"] = d.matrix;
    dj["coeffs"] = d.coeffs;
    json terms = json::array();
    for (const PolynomialTerm& t : d.terms) {
      std::vector<int> p(t.powers.begin(), t.powers.begin() + c.model.dim);
      terms.push_back({{"i", t.i}, {"j", t.j}, {"coeff", t.coeff}, {"powers", p}});
    }
    if (!d.terms.empty()) dj["terms"] = terms;
    j["direction"] = dj;
  }
  j["quadrature"] = {{"radial_nodes", c.quadrature.radial_nodes},
                     {"angular_degree", c.quadrature.angular_degree}};
  j["grid"] = {{"mode", to_string(c.grid.mode)},
               {"radial_modes", c.grid.radial_modes},
               {"full_degree", c.grid.full_degree},
               {"even_symmetry", c.grid.even_symmetry},
               {"galerkin_radial", c.grid.galerkin_orders.radial_nodes},
               {"galerkin_angular", c.grid.galerkin_orders.angular_degree},
               {"newton_tolerance", c.grid.newton_tolerance},
               {"max_iterations", c.grid.max_iterations}};
  const Tolerances& t = c.tolerances;
  j["tolerances"] = {{"critical_residual", t.critical_residual}, {"linearization", t.linearization},
                     {"second_scalar", t.second_scalar},         {"tt_trace", t.tt_trace},
                     {"tt_div", t.tt_div},                       {"path_first", t.path_first},
                     {"path_second", t.path_second},             {"rigidity", t.rigidity},
                     {"eigen_euclidean", t.eigen_euclidean},     {"eigen_hemisphere", t.eigen_hemisphere},
                     {"order", t.order},                         {"doubling", t.doubling}};
  j["sampling"] = {{"points", c.points}, {"directions", c.directions}, {"fd_step", c.fd_step}};
  j["seed"] = c.seed;
  j["second_variation"] = {{"expect_sign", c.expect_sign}, {"doubling_check", c.doubling_check}};
  j["saddle"] = {{"dims", c.dims}, {"kappas", c.kappas}, {"kappa_dim", c.kappa_dim}};
  j["large_ball"] = {{"harmonics", c.harmonics}};
  j["path"] = {{"step", c.step}, {"csv", c.csv}, {"largest_t", c.largest_t}, {"t_max", c.t_max}};
  return j;
}

ScenarioConfig parse_config(const json& j) {
  ScenarioConfig c;
  ObjectReader r(j, "");
  require(r.has("command"), "command", "missing");
  c.command = ObjectReader::convert<std::string>(r.raw("command"), "command");
  const auto& cmds = known_commands();
  require(std::find(cmds.begin(), cmds.end(), c.command) != cmds.end(), "command",
          "unknown command '" + c.command + "'");

  r.get("description", c.description);
  if (r.has("model")) read_model(r.child("model"), c.model);
  if (r.has("direction")) {
    DirectionSpec d;
    read_direction(r.child("direction"), d, c.model.dim);
    c.direction = d;
  }
  if (r.has("quadrature")) {
    ObjectReader q = r.child("quadrature");
    q.get("radial_nodes", c.quadrature.radial_nodes);
    q.get("angular_degree", c.quadrature.angular_degree);
    q.finish();
    require(c.quadrature.radial_nodes >= 2 && c.quadrature.angular_degree >= 2, "quadrature",
            "orders must be >= 2");
    c.quadrature_given = true;
  }
  if (r.has("grid")) read_grid(r.child("grid"), c.grid);
  if (r.has("tolerances")) read_tolerances(r.child("tolerances"), c.tolerances);
  if (r.has("sampling")) {
    ObjectReader s = r.child("sampling");
    s.get("points", c.points);
    s.get("directions", c.directions);
    s.get("fd_step", c.fd_step);
    s.finish();
    require(c.points >= 0 && c.directions >= 1, "sampling", "counts must be positive");
    require(c.fd_step >= 0 && c.fd_step < 0.5, "sampling.fd_step", "must lie in [0, 0.5)");
  }
  r.get("seed", c.seed);
  if (r.has("second_variation")) {
    ObjectReader s = r.child("second_variation");
    s.get("expect_sign", c.expect_sign);
    s.get("doubling_check", c.doubling_check);
    s.finish();
    require(c.expect_sign == "positive" || c.expect_sign == "negative" || c.expect_sign == "none",
            "second_variation.expect_sign", "expected positive, negative or none");
  }
  if (r.has("saddle")) {
    ObjectReader s = r.child("saddle");
    s.get_vector("dims", c.dims);
    s.get_vector("kappas", c.kappas);
    s.get("kappa_dim", c.kappa_dim);
    s.finish();
    for (int n : c.dims) require(n >= 3 && n <= kMaxDim, "saddle.dims", "entries must lie in [3, 6]");
    require(c.kappa_dim >= 3 && c.kappa_dim <= kMaxDim, "saddle.kappa_dim", "must lie in [3, 6]");
    for (double k : c.kappas) require(k > 0 && k < 1, "saddle.kappas", "entries must lie in (0, 1)");
  }
  if (r.has("large_ball")) {
    ObjectReader s = r.child("large_ball");
    s.get_vector("harmonics", c.harmonics);
    s.finish();
  }
  if (r.has("path")) {
    ObjectReader s = r.child("path");
    s.get("step", c.step);
    s.get("csv", c.csv);
    s.get("largest_t", c.largest_t);
    s.get("t_max", c.t_max);
    s.finish();
    require(c.step > 0, "path.step", "must be positive");
    require(c.t_max > 0, "path.t_max", "must be positive");
  }
  r.get("output", c.output);
  r.finish();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace volcrit::cli
