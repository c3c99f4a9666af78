#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "finslerlab/errors.hpp"

namespace finsler {

enum class AnisotropyKind { Euclidean, Ellipsoidal, SmoothedLq };

/// Report of the numerically estimated structural constants of an
/// anisotropy: ellipticity Lambda, Euclidean-equivalence constants
/// c1 <= H(xi) <= c2 on |xi|=1, and identity residuals.
struct AnisotropyReport {
    double lambda_hat = 0.0;
    double c1_hat = 0.0;
    double c2_hat = 0.0;
    double max_homogeneity_error = 0.0;
    double max_euler_error = 0.0;
    int sample_count = 0;
};

/// A positively 1-homogeneous Finsler norm H on R^N with analytic value,
/// gradient and Hessian. Three families:
///   - euclidean:   H(xi) = |xi|
///   - ellipsoidal: H(xi) = sqrt(xi^T A xi), A symmetric positive definite
///   - smoothed-lq: H(xi) = (sum_i (xi_i^2+eps^2)^{q/2} - N eps^q)^{1/q},
///     exactly the l^q norm for eps=0; eps>0 trades exact homogeneity near
///     the origin for C-infinity smoothness, and the violation is reported
///     rather than hidden.
///
/// Instances are immutable after construction; every evaluation is
/// reentrant and safe to call concurrently.
class Anisotropy {
  public:
    struct Eval {
        double H;
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
    };
    /// Allocation-free 2D evaluation for grid sweeps.
    struct Eval2 {
        double H;
        double gx, gy;
        double hxx, hxy, hyy;
    };

    static Anisotropy euclidean(int dimension = 2);
    static Anisotropy ellipsoidal(const Eigen::MatrixXd& A);
    static Anisotropy smoothed_lq(int dimension, double q, double eps = 0.0);

    AnisotropyKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const Eigen::MatrixXd& matrix() const { return A_; }
    double exponent() const { return q_; }
    double smoothing() const { return eps_; }
    double degeneracy_floor() const { return floor_; }

    /// H, grad H and D^2 H at xi. Throws DegenerateGradient when |xi| is
    /// below the degeneracy floor (callers mask critical-set cells instead
    /// of regularizing H).
    Eval evaluate(const Eigen::VectorXd& xi) const;
    Eval2 evaluate2(double x, double y) const;

    /// H(xi) only, same degeneracy floor.
    double value(const Eigen::VectorXd& xi) const;

    /// max over random (s, xi) of |H(s xi) - |s| H(xi)| / H(xi).
    double check_homogeneity(int n_samples, std::uint64_t seed) const;

    /// min over sampled xi on {H=1}, v orthogonal to grad H(xi), of
    /// <D^2H(xi) v, v> / |v|^2. Throws NotUniformlyElliptic when the
    /// estimate falls below the tolerance floor.
    double estimate_ellipticity(int n_boundary_samples) const;

    /// (min, max) of H over the Euclidean unit sphere, deterministic
    /// angular sweep with local extremum polishing in 2D.
    std::pair<double, double> estimate_norm_equivalence(int n_samples) const;

    /// Bundle of the checks above plus the Euler-identity residual.
    AnisotropyReport verify(int n_samples, std::uint64_t seed) const;

  private:
    Anisotropy() = default;

    AnisotropyKind kind_ = AnisotropyKind::Euclidean;
    int dim_ = 2;
    Eigen::MatrixXd A_;       // ellipsoidal only
    double q_ = 2.0;          // smoothed-lq only
    double eps_ = 0.0;        // smoothed-lq only
    double floor_ = 1e-14;
};

}  // namespace finsler
