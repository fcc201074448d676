#pragma once

#include "config.hpp"
#include "report.hpp"

namespace volcrit::cli {

/// Default ball quadrature for dimension n; coarser in higher dimensions where
/// the product rule grows like (angular degree)^(n-2).
QuadratureOrders default_orders(int n);

/// Runs cfg.command and fills `rep`. Library errors propagate.
void run_command(const ScenarioConfig& cfg, Report& rep);

}  // namespace volcrit::cli
