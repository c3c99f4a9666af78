#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "finslerlab/anisotropy.hpp"
#include "finslerlab/domain.hpp"
#include "finslerlab/profile.hpp"

// FFTW types, forward declared to keep the header light.
struct fftw_plan_s;

namespace finsler {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A smooth scalar field plus its gradient, given in closed form.
struct AnalyticField {
    std::function<double(double, double)> value;
    std::function<Eigen::Vector2d(double, double)> gradient;
};

/// Scalar field sampled on the mapped polar grid of a StarDomain.
struct GridField {
    std::shared_ptr<const StarDomain> domain;
    Grid values;

    static GridField sample(std::shared_ptr<const StarDomain> dom,
                            const std::function<double(double, double)>& f);
    static GridField zeros(std::shared_ptr<const StarDomain> dom);

    Eigen::ArrayXd boundary_trace() const;
    double max_abs_boundary_trace() const;

    /// CSV rows: r-index, theta-index, x1, x2, value.
    void write_csv(std::ostream& os) const;
};

struct VectorGrid {
    Grid x, y;
};

/// Discrete critical set Z = { |grad u| < floor }.
struct CriticalMask {
    BoolGrid masked;
    double floor = 0.0;
    double fraction = 0.0;
};

/// Finite-difference / spectral differentiation bound to one StarDomain:
/// second-order central differences in the radial coordinate (one-sided at
/// the outer boundary), FFT-spectral derivative in theta, least-squares
/// ray averaging at the pole. Also provides the exact adjoint of the
/// gradient, which the solver uses for discrete energy gradients.
///
/// Instances hold FFT scratch buffers: do not share one instance across
/// threads; independent instances are fine.
class Differential {
  public:
    explicit Differential(std::shared_ptr<const StarDomain> dom);
    ~Differential();
    Differential(const Differential&) = delete;
    Differential& operator=(const Differential&) = delete;

    const std::shared_ptr<const StarDomain>& domain() const { return dom_; }

    VectorGrid gradient(const Grid& u) const;
    Grid divergence(const VectorGrid& v) const;
    /// out = Dx^T a_x + Dy^T a_y for the same discrete operators as gradient().
    Grid gradient_adjoint(const VectorGrid& a) const;

    /// Spectral d/dtheta along every row (row 0 zeroed).
    Grid dtheta(const Grid& u) const;

  private:
    Grid ds(const Grid& u) const;
    void ds_adjoint_accum(const Grid& b, Grid& out) const;

    std::shared_ptr<const StarDomain> dom_;
    mutable std::vector<double> rbuf_;
    mutable std::vector<double> cbuf_;  // interleaved complex
    fftw_plan_s* fwd_ = nullptr;
    fftw_plan_s* bwd_ = nullptr;
};

/// Pointwise fields of the operator: grad u, H(grad u), B/B'(H), and the
/// stress S = B'(H(grad u)) grad H(grad u), with S = 0 on the critical
/// mask (the continuous extension, since B'(0) = 0 for kappa = 0).
struct OperatorFields {
    VectorGrid grad;
    VectorGrid stress;
    Grid H, B, dB;
    CriticalMask mask;
};

OperatorFields operator_fields(const GridField& u, const Profile& pr, const Anisotropy& a,
                               const Differential& d);

/// spec name: stress field + mask only.
struct StressField {
    VectorGrid S;
    CriticalMask mask;
};
StressField stress_field(const GridField& u, const Profile& pr, const Anisotropy& a,
                         const Differential& d);

/// Source g(x,s) = f(x) * phi(s), with primitives G(x,t) = f(x) Phi(t) + G0
/// accumulated in closed form (or adaptive quadrature for custom phi).
/// The spatial factor is either analytic or bound to grid samples.
class SourceModel {
  public:
    static SourceModel constant(double c);
    static SourceModel separable(std::function<double(double, double)> f,
                                 std::function<Eigen::Vector2d(double, double)> grad_f);
    /// g(u) = coeff |u|^{m-1} u (x-independent power nonlinearity).
    static SourceModel power_nonlinearity(double m, double coeff = 1.0);
    /// g(x,s) = f(x) with f (and its discrete gradient) sampled on a grid.
    static SourceModel from_grid(GridField f, const Differential& d);
    /// Custom s-shape phi on top of a constant spatial factor; Phi by
    /// adaptive Simpson (tol 1e-12).
    static SourceModel custom_shape(std::function<double(double)> phi);

    /// Shifted primitive: replaces G(x,t) by G(x,t) + g0. The Pohozaev
    /// identity is invariant under the shift; the nonexistence condition
    /// is not, which is the point.
    SourceModel with_primitive_offset(double g0) const;

    bool x_dependent_only() const { return shape_ == Shape::One; }
    bool u_dependent_only() const;
    bool is_power() const { return shape_ == Shape::Power; }
    double power_exponent() const { return m_; }
    double primitive_offset() const { return g0_; }
    bool grid_bound() const { return spatial_ == Spatial::GridBound; }
    const std::shared_ptr<const StarDomain>& bound_domain() const { return bound_dom_; }

    double g(double x, double y, double s) const;
    double G(double x, double y, double t) const;
    double x_dot_grad_G(double x, double y, double t) const;

    /// Node-bound evaluation; for grid-bound sources (i,j) index the bound
    /// domain's grid, otherwise the node coordinates are used.
    double g_at(int i, int j, double s) const;
    double G_at(int i, int j, double t) const;
    double x_dot_grad_G_at(int i, int j, double t) const;

  private:
    enum class Spatial { Constant, Analytic, GridBound };
    enum class Shape { One, Power, Custom };

    SourceModel() = default;

    double spatial(double x, double y) const;
    double x_dot_grad_spatial(double x, double y) const;
    double phi(double s) const;
    double Phi(double t) const;

    Spatial spatial_ = Spatial::Constant;
    Shape shape_ = Shape::One;
    double const_f_ = 1.0;
    std::function<double(double, double)> f_;
    std::function<Eigen::Vector2d(double, double)> grad_f_;
    std::shared_ptr<const StarDomain> bound_dom_;
    Grid f_grid_;
    Grid fx_grid_, fy_grid_;
    double m_ = 1.0;
    double coeff_ = 1.0;
    std::function<double(double)> phi_;
    double g0_ = 0.0;
};

/// f = -div(B'(H(grad u)) grad H(grad u)) on the grid; the pair
/// (u, g(x,s) = f(x)) then satisfies the equation up to discretization
/// error. warning is set when the masked fraction exceeds 1%.
struct ManufacturedSource {
    GridField f;
    double masked_fraction = 0.0;
    bool warning = false;
};
ManufacturedSource manufactured_source(const GridField& u, const Profile& pr,
                                       const Anisotropy& a, const Differential& d);

/// Weak-form defect int <S, grad phi> - int g(x,u) phi for a test field
/// phi that vanishes near the boundary.
double weak_residual(const GridField& u, const SourceModel& src, const Profile& pr,
                     const Anisotropy& a, const Differential& d, const AnalyticField& phi);

/// Discrete int_E |grad S|^2 (Frobenius) over E = { s <= interior_fraction },
/// one entry per requested radial resolution (theta resolution scaled
/// proportionally). Boundedness of the sequence is the observable form of
/// S in W^{1,2}_loc.
std::vector<double> stress_sobolev_diagnostic(const std::function<double(double, double)>& u_fn,
                                              const Profile& pr, const Anisotropy& a,
                                              const StarDomain& base,
                                              std::span<const int> radial_resolutions,
                                              double interior_fraction);

}  // namespace finsler
