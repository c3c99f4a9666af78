#pragma once

#include <span>
#include <utility>
#include <vector>

#include "finslerlab/field.hpp"

namespace finsler {

/// Both sides of the Pohozaev identity, term by term.
///   lhs = int_Omega N G(x,u) + x.grad_x G(x,u) - N B(H(grad u)) + B'(H(grad u)) H(grad u)
///   rhs = int_dOmega G(x,u)(x.eta) - B(H(grad u))(x.eta)
///         + B'(H(grad u)) (x.grad u)(grad H(grad u).eta)
struct IdentityReport {
    double vol_n_G = 0.0;
    double vol_x_grad_G = 0.0;
    double vol_minus_n_B = 0.0;
    double vol_bprime_H = 0.0;
    double bdy_G_xeta = 0.0;
    double bdy_minus_B_xeta = 0.0;
    double bdy_stress_xgradu_eta = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    int n_r = 0;
    int n_theta = 0;
    double masked_fraction = 0.0;
};

struct NonexistenceReport {
    double min_value = 0.0;
    bool condition_holds = false;
    double tolerance = 0.0;
};

struct DirichletReduction {
    double reduced = 0.0;     // int [G(x,0) - B + B'H](x.eta) ds
    double unreduced = 0.0;   // the three raw boundary terms
    double power_form = 0.0;  // ((p-1)/p) int H^p(grad u)(x.eta) ds, NaN unless power profile
    double rel_diff = 0.0;    // |reduced - unreduced| / max(|reduced|, |unreduced|)
};

struct WholespaceReport {
    double lhs = 0.0;          // int N G + x.grad_x G   (theorem-statement sign)
    double rhs = 0.0;          // int N B(H(grad u)) - B'(H(grad u)) H(grad u)
    double lhs_alt_sign = 0.0; // int N G - x.grad_x G   (the proof-display sign)
    double residual_rel = 0.0;
    double residual_alt_rel = 0.0;
    double term_scale = 0.0;
    std::vector<std::pair<double, double>> decay;  // (r_n, r_n * int_{|x|=r_n} B(H(grad u)) + |G| ds)
    double masked_fraction = 0.0;
};

/// Evaluate all seven terms of the identity with the module quadratures.
/// Both sides come from the same GridField and rules; nothing is
/// back-substituted from the equation.
IdentityReport identity_sides(const GridField& u, const SourceModel& src, const Profile& pr,
                              const Anisotropy& a, const Differential& d);

/// The classical p-Laplacian form, computed from |grad u| directly
/// (independent algebraic route). Requires power profile, Euclidean
/// anisotropy and g = g(u); throws WrongSpecialization otherwise.
IdentityReport classical_plap_form(const GridField& u, const SourceModel& src, const Profile& pr,
                                   const Anisotropy& a, const Differential& d);

/// For zero-trace u: the reduced boundary integrand [G(x,0) - B + B'H](x.eta)
/// against the unreduced trio, plus the ((p-1)/p) int H^p (x.eta) display for
/// power profiles. Throws TraceNotZero when the boundary trace is not zero.
DirichletReduction dirichlet_boundary_reduction(const GridField& u, const SourceModel& src,
                                                const Profile& pr, const Anisotropy& a,
                                                const Differential& d);

/// Scan of G(x,0) - B(t H(w)) + B'(t H(w)) t H(w) over boundary points x,
/// unit directions w and magnitudes t (1-homogeneity reduces xi to t w).
NonexistenceReport nonexistence_scan(const SourceModel& src, const Profile& pr,
                                     const Anisotropy& a, const StarDomain& dom,
                                     std::span<const double> t_grid, int n_directions);

/// p* - 1 = (N(p-1)+p)/(N-p); throws SupercriticalDimensionPair unless 1 < p < N.
double critical_exponent(double p, double N);

/// N int G(u) - ((N-p)/p) int g(u) u for zero-trace u and g = g(u); the
/// dimension N of the corollary is passed explicitly (quadrature is 2D).
double subcritical_functional(const GridField& u, const SourceModel& src, const Profile& pr,
                              const Anisotropy& a, const Differential& d, double N_dim);

/// Whole-space identity on expanding balls, truncated at the compact
/// support of u. Reports both signs of the x.grad_x G term and the
/// boundary-decay table r_n int_{|x|=r_n} (B(H(grad u)) + |G|) ds.
WholespaceReport wholespace_check(const AnalyticField& u, double support_radius,
                                  const Profile& pr, const Anisotropy& a, double grid_radius,
                                  int n_r, int n_theta, std::span<const double> radii);

}  // namespace finsler
