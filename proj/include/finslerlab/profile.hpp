#pragma once

#include <span>
#include <vector>

#include "finslerlab/errors.hpp"

namespace finsler {

enum class ProfileKind { Power, Regularized };

/// Tightest constants fitting gamma (kappa+t)^{p-2} t <= B'(t) <= Gamma (kappa+t)^{p-2} t
/// (and the matching B'' bounds) on the tested grid.
struct BoundsReport {
    double gamma_hat = 0.0;        // B' lower ratio
    double Gamma_hat = 0.0;        // B' upper ratio
    double gamma_hat_second = 0.0; // B'' lower ratio
    double Gamma_hat_second = 0.0; // B'' upper ratio
    double t_min = 0.0;
    double t_max = 0.0;
    bool pass = false;
};

/// The profile B of the operator -div(B'(H(grad u)) grad H(grad u)).
/// Two families:
///   - power:       B(t) = t^p / p
///   - regularized: B'(t) = (kappa^2 + t^2)^{(p-2)/2} t, whose antiderivative
///     is closed-form for every p > 1: B(t) = ((kappa^2+t^2)^{p/2} - kappa^p)/p.
/// Immutable after construction; evaluation is reentrant.
class Profile {
  public:
    struct Eval {
        double B, dB, d2B;
    };

    static Profile power(double p);
    static Profile regularized(double p, double kappa);

    ProfileKind kind() const { return kind_; }
    double p() const { return p_; }
    double kappa() const { return kappa_; }

    /// (B, B', B'') at t >= 0; throws NegativeArgument otherwise.
    Eval evaluate(double t) const;
    double B(double t) const;
    double dB(double t) const;
    double d2B(double t) const;

    /// Ratio scan of B' and B'' against (kappa+t)^{p-2}(t) on a grid.
    BoundsReport check_structural_bounds(std::span<const double> t_grid) const;
    BoundsReport check_structural_bounds() const;  // default log grid [1e-6,1e6], 1e4 pts

    /// C_hat = max over the grid of B'(t) t / B(t)  (finite for admissible B).
    double bprime_times_t_vs_B(std::span<const double> t_grid) const;
    double bprime_times_t_vs_B() const;

    static std::vector<double> log_grid(double t_min, double t_max, int n);

  private:
    Profile(ProfileKind k, double p, double kappa) : kind_(k), p_(p), kappa_(kappa) {}

    ProfileKind kind_;
    double p_;
    double kappa_;
};

}  // namespace finsler
