#pragma once

// End-to-end procedure runner and trajectory verifier; reports are
// deterministic JSON (byte-identical for identical inputs and options).

#include <optional>
#include <string>
#include <vector>

#include "lq/catalog.hpp"

namespace lq {

enum class Route { Central, Lateral, Both };

struct RunOptions {
  double tol = 1e-9;
  int samples = 200;
  unsigned seed = 0;
  Route route = Route::Both;
};

struct RunResult {
  bool pass = false;
  std::string report_json;
};

// Steps: 0 sanity (determining residuals, symmetry defects, non-equivalence),
// 1 rho, 2 f-pair, 3 w-forms + potentials vs closed forms, 4 reduced RHS +
// g-pair + commuting brackets, 5 I-forms + potentials + integrating factors +
// Jacobi last multiplier (central route); reduced/auxiliary factors (lateral
// route).  A partial report is produced even when a step throws.
RunResult run_pipeline(const Problem& p, const RunOptions& opt);

struct IcRequest {
  double x0 = 0.0, u0 = 0.0, ux0 = 0.0, x_end = 1.0;
};

// Integrates each IC, reports first-integral drifts and (when constants are
// supplied and a solution template exists) closed-form agreement.
RunResult verify_trajectories(const Problem& p,
                              const std::vector<IcRequest>& ics,
                              const RunOptions& opt,
                              std::optional<std::pair<double, double>> c12,
                              const std::string& csv_prefix = {});

}  // namespace lq
