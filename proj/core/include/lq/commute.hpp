#pragma once

// Construction of the commuting fields: rho, the f-pair and g-pair
// conditions, the rescaled fields Y_i = f_i X_i and the commuting
// generalized symmetries Z_i = (f_i g_i) X_i.

#include <string>
#include <vector>

#include "lq/jetfield.hpp"
#include "lq/sample.hpp"

namespace lq {

struct ResidualEntry {
  std::string name;
  ZeroCheck check;
  double tol = 0.0;
};

struct CommuteInput {
  Expr phi;
  Expr lambda1, lambda2;
  Expr f1, f2;
  Expr g1, g2;  // in jet coordinates (substituted through w_i when needed)
  Box box;
};

struct CommutingData {
  Expr lambda1, lambda2, rho;
  Expr f1, f2, rho1, rho2;
  Expr g1, g2, h1, h2;
  JetField A, X1, X2, Y1, Y2, Z1, Z2;
};

class EquivalentPairsError : public std::runtime_error {
 public:
  explicit EquivalentPairsError(const std::string& msg)
      : std::runtime_error(msg) {}
};

class ResidualFailure : public std::runtime_error {
 public:
  ResidualFailure(const std::string& msg, ResidualEntry entry)
      : std::runtime_error(msg), entry_(std::move(entry)) {}
  const ResidualEntry& entry() const { return entry_; }

 private:
  ResidualEntry entry_;
};

// (X1(lambda2) - X2(lambda1)) / (lambda1 - lambda2).
// Throws EquivalentPairsError when lambda1 - lambda2 vanishes on the box.
Expr rho_fn(const Expr& lambda1, const Expr& lambda2, const Box& box,
            double tol = 1e-9, int samples = 200, unsigned seed = 0);

// Residuals X2(f1) - rho f1 and X1(f2) - rho f2.
std::vector<Expr> verify_f_pair(const Expr& f1, const Expr& f2,
                                const Expr& rho, const Expr& lambda1,
                                const Expr& lambda2);

// Residuals A(g1) - rho1 g1, Y2(g1), A(g2) - rho2 g2, Y1(g2).
std::vector<Expr> verify_g_pair(const Expr& g1, const Expr& g2,
                                const Expr& rho1, const Expr& rho2,
                                const Expr& phi, const JetField& Y1,
                                const JetField& Y2);

// Validates the input residuals, assembles all fields, and checks the six
// bracket identities [Y1,A]-rho1 Y1, [Y2,A]-rho2 Y2, [Y1,Y2], [Z1,A],
// [Z2,A], [Z1,Z2] componentwise.  Throws on equivalent pairs or on a failed
// precondition residual; bracket results land in `report`.
CommutingData build_commuting(const CommuteInput& in, int samples, double tol,
                              unsigned seed,
                              std::vector<ResidualEntry>* report);

}  // namespace lq
