#pragma once

#include <vector>

#include "finslerlab/field.hpp"

namespace finsler {

struct SolverConfig {
    int max_iterations = 50000;
    /// On the weight-scaled sup norm of the discrete energy gradient
    /// (a pointwise strong-form residual scale).
    double gradient_tolerance = 1e-8;
    /// kappa continuation: start at kappa_start and decrease geometrically
    /// by kappa_factor for kappa_steps stages, then finish on the target
    /// profile itself. kappa_steps = 0 disables continuation.
    double kappa_start = 0.0;
    double kappa_factor = 0.25;
    int kappa_steps = 0;
    double backtrack_factor = 0.5;
    double sufficient_decrease = 1e-4;
};

struct SolveResult {
    GridField u;
    int iterations = 0;
    double final_energy = 0.0;
    double final_gradient_norm = 0.0;
    std::vector<double> kappa_path;
    std::vector<double> stage_energies;
    bool converged = false;
};

/// Closed-form radial solution of -div(|grad u|^{p-2} grad u) = 1 on B_R:
///   u(r) = ((p-1)/p) N^{-1/(p-1)} (R^{p/(p-1)} - r^{p/(p-1)}).
struct TorsionOracle {
    double p, N, R;
    double value(double r) const;
    double dvalue(double r) const;
    double operator()(double x, double y) const;
    AnalyticField field() const;
};
TorsionOracle torsion_oracle(double p, double N, double R);

/// Discrete energy int B(H(grad u)) - G(x,u) over the domain quadrature.
double energy(const GridField& u, const SourceModel& src, const Profile& pr,
              const Anisotropy& a, const Differential& d);

/// Zero-trace minimizer of the energy by preconditioned Polak-Ribiere
/// conjugate gradient with a quadratic-fit + backtracking line search and
/// optional kappa continuation. Coercive sources only: x-only g = f(x), or
/// power g(u)=|u|^{m-1}u with m < p-1 (throws NotCoercive otherwise).
SolveResult solve_dirichlet(const SourceModel& src, const Profile& pr, const Anisotropy& a,
                            std::shared_ptr<const StarDomain> dom, const SolverConfig& cfg);

}  // namespace finsler
