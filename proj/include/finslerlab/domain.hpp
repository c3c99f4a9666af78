#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "finslerlab/errors.hpp"

namespace finsler {

/// Row-major grid: row i = fixed radial index, contiguous in the angular
/// index j (the layout the spectral theta-derivative batches over).
using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class StarShapeClass { StrictlyStarShaped, StarShaped, NotStarShaped };

struct StarShapeReport {
    StarShapeClass classification = StarShapeClass::NotStarShaped;
    double min_x_dot_eta = 0.0;
};

/// Nodes and weights realizing a volume or boundary integral on the domain.
struct QuadratureRule {
    enum class Kind { Volume, Boundary };
    Kind kind;
    std::vector<double> x, y, w;
};

/// A smooth planar domain given as a polar graph r < rho(theta) over the
/// origin, with rho either a truncated Fourier series
///   rho(theta) = c0 + sum_k ck cos(k theta) + sk sin(k theta)
/// or the exact polar form of an axis-aligned ellipse. Carries the mapped
/// polar tensor grid (n_r x n_theta, radial coordinate s in [0,1] with
/// r = s rho(theta)), trapezoid volume weights (spectral in theta), the
/// boundary arclength rule, outward normals, and the inverse-transpose
/// Jacobian factors used by the finite-difference stencils.
///
/// Immutable after construction. Radius functions that dip <= 0 are
/// accepted for classification purposes but mark the domain invalid;
/// quadrature and grid accessors then throw InvalidDomain.
class StarDomain {
  public:
    struct FourierRadius {
        std::vector<double> cos_coeffs;  // c0, c1, ...
        std::vector<double> sin_coeffs;  // s1, s2, ... (may be empty)
    };
    struct EllipseRadius {
        double a, b;
    };
    using RadiusSpec = std::variant<FourierRadius, EllipseRadius>;

    static std::shared_ptr<const StarDomain> disk(double radius, int n_r, int n_theta);
    static std::shared_ptr<const StarDomain> ellipse(double a, double b, int n_r, int n_theta);
    static std::shared_ptr<const StarDomain> fourier(std::vector<double> cos_coeffs,
                                                     std::vector<double> sin_coeffs,
                                                     int n_r, int n_theta);
    std::shared_ptr<const StarDomain> with_resolution(int n_r, int n_theta) const;

    int n_r() const { return n_r_; }
    int n_theta() const { return n_theta_; }
    double ds() const { return 1.0 / (n_r_ - 1); }
    double dtheta() const { return 2.0 * M_PI / n_theta_; }
    bool valid() const { return valid_; }
    double min_rho() const { return min_rho_; }
    const RadiusSpec& radius_spec() const { return spec_; }

    double rho(double theta) const;
    double drho(double theta) const;
    Eigen::Vector2d boundary_point(double theta) const;

    /// Unit outward normal, closed form from (rho, rho').
    Eigen::Vector2d outward_normal(double theta) const;

    /// min over a dense boundary sweep of sign(rho) * x.eta; strictly
    /// star-shaped iff the minimum clears the tolerance.
    StarShapeReport star_shape_classify() const;

    double integrate_volume(const std::function<double(double, double)>& f) const;
    double integrate_boundary(const std::function<double(double, double)>& f) const;

    /// Fixed-order reductions of node-sampled values (deterministic).
    double volume_sum(const Grid& node_values) const;
    double boundary_sum(const Eigen::ArrayXd& per_theta_values) const;

    QuadratureRule volume_rule() const;
    QuadratureRule boundary_rule() const;

    // --- mapped grid accessors (valid domains only) ---
    double s(int i) const { return i * ds(); }
    double theta(int j) const { return j * dtheta(); }
    const Grid& xs() const { return require_valid(), xs_; }
    const Grid& ys() const { return require_valid(), ys_; }
    const Grid& volume_weights() const { return require_valid(), wvol_; }
    const Eigen::ArrayXd& rho_nodes() const { return require_valid(), rho_; }
    const Eigen::ArrayXd& drho_nodes() const { return require_valid(), drho_; }
    const Eigen::ArrayXd& boundary_weights() const { return require_valid(), wbdy_; }
    const Eigen::ArrayXd& normal_x() const { return require_valid(), nx_; }
    const Eigen::ArrayXd& normal_y() const { return require_valid(), ny_; }
    /// J^{-T} factors: grad_x = P u_s + Q u_theta, grad_y = R u_s + T u_theta (rows i >= 1).
    const Grid& jinv_P() const { return require_valid(), P_; }
    const Grid& jinv_Q() const { return require_valid(), Q_; }
    const Grid& jinv_R() const { return require_valid(), R_; }
    const Grid& jinv_T() const { return require_valid(), T_; }

    StarDomain(RadiusSpec spec, int n_r, int n_theta);

  private:
    void require_valid() const {
        if (!valid_) throw InvalidDomain("star domain: radius function is not positive");
    }

    RadiusSpec spec_;
    int n_r_;
    int n_theta_;
    bool valid_ = false;
    double min_rho_ = 0.0;

    Grid xs_, ys_, wvol_, P_, Q_, R_, T_;
    Eigen::ArrayXd rho_, drho_, wbdy_, nx_, ny_;
};

}  // namespace finsler
