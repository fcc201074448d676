#pragma once

// Scenario configuration of the volcrit driver. Parsed from JSON; unknown keys
// and wrongly typed values are rejected before anything is computed.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "volcrit/fields.hpp"
#include "volcrit/spaceform.hpp"
#include "volcrit/yamabe.hpp"

namespace volcrit::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DirectionKind {
  tt_profile,
  parallel_tracefree,
  conformal,
  custom_polynomial,
  radial_normal,
  tangential
};

std::string to_string(DirectionKind k);

struct ModelSpec {
  Model model = Model::euclidean;
  int dim = 3;
  double radius = 1.0;           // geodesic radius
  double curvature_scale = 1.0;  // k; ignored for euclidean
};

struct TTSpec {
  int harmonic = 0;                  // catalogue index
  std::vector<double> harmonic_matrix;  // overrides the index when non-empty
  double r1 = 0.25;                  // support as fractions of the outer warped radius
  double r2 = 0.8;
  double amplitude = 1.0;
  double sharpness = 1.0;
  std::vector<double> poly{1.0};
};

struct DirectionSpec {
  DirectionKind kind = DirectionKind::parallel_tracefree;
  TTSpec tt;
  std::vector<double> matrix;  // parallel_tracefree (row-major n*n); default diag(1,-1,0,...)
  std::vector<double> coeffs{1.0};  // polynomial in s for conformal/radial_normal/tangential
  std::vector<PolynomialTerm> terms;  // custom_polynomial
};

struct Tolerances {
  double critical_residual = 1e-8;
  double linearization = 1e-6;
  double second_scalar = 1e-5;
  double tt_trace = 1e-10;
  double tt_div = 1e-8;
  double path_first = 1e-6;
  double path_second = 1e-3;
  double rigidity = 1e-6;
  double eigen_euclidean = 1e-8;
  double eigen_hemisphere = 1e-6;
  double order = 1.8;
  double doubling = 1e-10;
};

struct ScenarioConfig {
  std::string command;
  std::string description;  // free text, echoed only
  ModelSpec model;
  std::optional<DirectionSpec> direction;
  QuadratureOrders quadrature{48, 20};
  bool quadrature_given = false;
  GridSpec grid;
  Tolerances tolerances;
  std::string output;
  std::uint64_t seed = 1;

  // sampling (linearization-check, second-scalar-check, tt-build); 0 selects
  // the command default (20 or 200 points, step 1e-3 or 1e-2)
  int points = 0;
  int directions = 10;
  double fd_step = 0.0;

  // second-variation
  std::string expect_sign = "none";  // positive, negative, none
  bool doubling_check = false;

  // saddle-demo
  std::vector<int> dims{3, 4, 5, 6};
  std::vector<double> kappas{0.4, 0.2, 0.1, 0.05};
  int kappa_dim = 3;

  // large-ball-demo
  std::vector<int> harmonics{0, 1, 2};

  // yamabe-path
  double step = 0.02;
  std::string csv;
  bool largest_t = false;
  double t_max = 1.0;
};

/// Throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

/// Normalized configuration (defaults filled in) for the report.
nlohmann::json config_echo(const ScenarioConfig& c);

const std::vector<std::string>& known_commands();

}  // namespace volcrit::cli
