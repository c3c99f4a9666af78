#include "finslerlab/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <ostream>

#include "finslerlab/numerics.hpp"

namespace finsler {

// ---------------------------------------------------------------- GridField

GridField GridField::sample(std::shared_ptr<const StarDomain> dom,
                            const std::function<double(double, double)>& f) {
    GridField g;
    g.domain = std::move(dom);
    const auto& xs = g.domain->xs();
    const auto& ys = g.domain->ys();
    g.values.resize(xs.rows(), xs.cols());
    for (int i = 0; i < xs.rows(); ++i)
        for (int j = 0; j < xs.cols(); ++j) {
            const double v = f(xs(i, j), ys(i, j));
            if (!std::isfinite(v)) throw std::invalid_argument("GridField: non-finite sample");
            g.values(i, j) = v;
        }
    return g;
}

GridField GridField::zeros(std::shared_ptr<const StarDomain> dom) {
    GridField g;
    g.domain = std::move(dom);
    g.values = Grid::Zero(g.domain->n_r(), g.domain->n_theta());
    return g;
}

Eigen::ArrayXd GridField::boundary_trace() const {
    return values.row(values.rows() - 1).transpose();
}

double GridField::max_abs_boundary_trace() const {
    return values.row(values.rows() - 1).abs().maxCoeff();
}

void GridField::write_csv(std::ostream& os) const {
    os << "r_index,theta_index,x1,x2,value\n";
    char buf[64];
    const auto& xs = domain->xs();
    const auto& ys = domain->ys();
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < values.cols(); ++j) {
            os << i << ',' << j;
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g", xs(i, j), ys(i, j), values(i, j));
            os << buf << '\n';
        }
}

// ------------------------------------------------------------- Differential

Differential::Differential(std::shared_ptr<const StarDomain> dom) : dom_(std::move(dom)) {
    dom_->xs();  // force validity
    const int nr = dom_->n_r(), nt = dom_->n_theta();
    rbuf_.resize(static_cast<std::size_t>(nr) * nt);
    cbuf_.resize(static_cast<std::size_t>(nr) * (nt / 2 + 1) * 2);
    int n[1] = {nt};
    fwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_many_dft_r2c(
        1, n, nr, rbuf_.data(), nullptr, 1, nt,
        reinterpret_cast<fftw_complex*>(cbuf_.data()), nullptr, 1, nt / 2 + 1, FFTW_ESTIMATE));
    bwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_many_dft_c2r(
        1, n, nr, reinterpret_cast<fftw_complex*>(cbuf_.data()), nullptr, 1, nt / 2 + 1,
        rbuf_.data(), nullptr, 1, nt, FFTW_ESTIMATE));
}

Differential::~Differential() {
    if (fwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(bwd_));
}

Grid Differential::dtheta(const Grid& u) const {
    const int nr = dom_->n_r(), nt = dom_->n_theta();
    std::copy(u.data(), u.data() + static_cast<std::size_t>(nr) * nt, rbuf_.begin());
    fftw_execute(reinterpret_cast<fftw_plan>(fwd_));
    auto* c = reinterpret_cast<fftw_complex*>(cbuf_.data());
    const int nk = nt / 2 + 1;
    for (int i = 0; i < nr; ++i) {
        for (int k = 0; k < nk; ++k) {
            fftw_complex& z = c[i * nk + k];
            if (k == 0 || 2 * k == nt) {
                z[0] = 0.0;
                z[1] = 0.0;
                continue;
            }
            // multiply by i k / nt (the 1/nt normalizes the round trip)
            const double re = z[0], im = z[1];
            const double f = static_cast<double>(k) / nt;
            z[0] = -im * f;
            z[1] = re * f;
        }
    }
    fftw_execute(reinterpret_cast<fftw_plan>(bwd_));
    Grid out(nr, nt);
    std::copy(rbuf_.begin(), rbuf_.end(), out.data());
    out.row(0).setZero();
    return out;
}

Grid Differential::ds(const Grid& u) const {
    const int nr = dom_->n_r(), nt = dom_->n_theta();
    const double h = dom_->ds();
    Grid out = Grid::Zero(nr, nt);
    for (int i = 1; i < nr - 1; ++i)
        for (int j = 0; j < nt; ++j)
            out(i, j) = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
    const int e = nr - 1;
    for (int j = 0; j < nt; ++j)
        out(e, j) = (3.0 * u(e, j) - 4.0 * u(e - 1, j) + u(e - 2, j)) / (2.0 * h);
    return out;
}

void Differential::ds_adjoint_accum(const Grid& b, Grid& out) const {
    const int nr = dom_->n_r(), nt = dom_->n_theta();
    const double h = dom_->ds();
    for (int i = 1; i < nr - 1; ++i)
        for (int j = 0; j < nt; ++j) {
            const double c = b(i, j) / (2.0 * h);
            out(i + 1, j) += c;
            out(i - 1, j) -= c;
        }
    const int e = nr - 1;
    for (int j = 0; j < nt; ++j) {
        const double c = b(e, j) / (2.0 * h);
        out(e, j) += 3.0 * c;
        out(e - 1, j) -= 4.0 * c;
        out(e - 2, j) += c;
    }
}

VectorGrid Differential::gradient(const Grid& u) const {
    const int nr = dom_->n_r(), nt = dom_->n_theta();
    const Grid us = ds(u);
    const Grid ut = dtheta(u);
    const Grid& P = dom_->jinv_P();
    const Grid& Q = dom_->jinv_Q();
    const Grid& R = dom_->jinv_R();
    const Grid& T = dom_->jinv_T();
    VectorGrid g;
    g.x = P * us + Q * ut;
    g.y = R * us + T * ut;

    // Pole: one-sided radial derivative along every ray, least-squares
    // averaged over the innermost ring.
    const auto& rho = dom_->rho_nodes();
    const double h = dom_->ds();
    double gx = 0.0, gy = 0.0;
    for (int j = 0; j < nt; ++j) {
        const double dr = h * rho[j];
        const double d = (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * dr);
        gx += d * std::cos(dom_->theta(j));
        gy += d * std::sin(dom_->theta(j));
    }
    gx *= 2.0 / nt;
    gy *= 2.0 / nt;
    g.x.row(0).setConstant(gx);
    g.y.row(0).setConstant(gy);
    return g;
}

Grid Differential::divergence(const VectorGrid& v) const {
    return gradient(v.x).x + gradient(v.y).y;
}

Grid Differential::gradient_adjoint(const VectorGrid& a) const {
    const int nr = dom_->n_r(), nt = dom_->n_theta();
    const Grid& P = dom_->jinv_P();
    const Grid& Q = dom_->jinv_Q();
    const Grid& R = dom_->jinv_R();
    const Grid& T = dom_->jinv_T();
    Grid bs = P * a.x + R * a.y;
    Grid bt = Q * a.x + T * a.y;
    bs.row(0).setZero();
    bt.row(0).setZero();

    Grid out = Grid::Zero(nr, nt);
    ds_adjoint_accum(bs, out);
    out -= dtheta(bt);  // spectral derivative is skew-adjoint

    // Pole rows: gradient(0,:) = sum_k coef_k . stencil_k(u).
    const auto& rho = dom_->rho_nodes();
    const double h = dom_->ds();
    double Ax = 0.0, Ay = 0.0;
    for (int j = 0; j < nt; ++j) {
        Ax += a.x(0, j);
        Ay += a.y(0, j);
    }
    for (int k = 0; k < nt; ++k) {
        const double dr = h * rho[k];
        const double cx = (2.0 / nt) * std::cos(dom_->theta(k)) / (2.0 * dr);
        const double cy = (2.0 / nt) * std::sin(dom_->theta(k)) / (2.0 * dr);
        const double e = Ax * cx + Ay * cy;
        out(0, k) += -3.0 * e;
        out(1, k) += 4.0 * e;
        out(2, k) += -e;
    }
    return out;
}

// ------------------------------------------------------------ stress fields

OperatorFields operator_fields(const GridField& u, const Profile& pr, const Anisotropy& a,
                               const Differential& d) {
    if (u.domain.get() != d.domain().get())
        throw std::invalid_argument("operator_fields: field and differential domains differ");
    OperatorFields out;
    out.grad = d.gradient(u.values);
    const int nr = u.domain->n_r(), nt = u.domain->n_theta();
    const Grid mag = (out.grad.x.square() + out.grad.y.square()).sqrt();
    const double scale = mag.maxCoeff();
    const double floor = 1e-10 * scale;

    out.mask.floor = floor;
    out.mask.masked.resize(nr, nt);
    out.stress.x = Grid::Zero(nr, nt);
    out.stress.y = Grid::Zero(nr, nt);
    out.H = Grid::Zero(nr, nt);
    out.B = Grid::Zero(nr, nt);
    out.dB = Grid::Zero(nr, nt);

    long masked = 0;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            if (mag(i, j) <= floor || scale == 0.0) {
                out.mask.masked(i, j) = true;
                ++masked;
                continue;
            }
            out.mask.masked(i, j) = false;
            const auto e = a.evaluate2(out.grad.x(i, j), out.grad.y(i, j));
            const auto b = pr.evaluate(e.H);
            out.H(i, j) = e.H;
            out.B(i, j) = b.B;
            out.dB(i, j) = b.dB;
            out.stress.x(i, j) = b.dB * e.gx;
            out.stress.y(i, j) = b.dB * e.gy;
        }
    out.mask.fraction = static_cast<double>(masked) / (static_cast<double>(nr) * nt);
    return out;
}

StressField stress_field(const GridField& u, const Profile& pr, const Anisotropy& a,
                         const Differential& d) {
    OperatorFields f = operator_fields(u, pr, a, d);
    return StressField{std::move(f.stress), std::move(f.mask)};
}

// -------------------------------------------------------------- SourceModel

SourceModel SourceModel::constant(double c) {
    SourceModel s;
    s.spatial_ = Spatial::Constant;
    s.const_f_ = c;
    s.shape_ = Shape::One;
    return s;
}

SourceModel SourceModel::separable(std::function<double(double, double)> f,
                                   std::function<Eigen::Vector2d(double, double)> grad_f) {
    SourceModel s;
    s.spatial_ = Spatial::Analytic;
    s.f_ = std::move(f);
    s.grad_f_ = std::move(grad_f);
    s.shape_ = Shape::One;
    return s;
}

SourceModel SourceModel::power_nonlinearity(double m, double coeff) {
    if (!(m > 0.0)) throw std::invalid_argument("power_nonlinearity: m > 0 required");
    SourceModel s;
    s.spatial_ = Spatial::Constant;
    s.const_f_ = 1.0;
    s.shape_ = Shape::Power;
    s.m_ = m;
    s.coeff_ = coeff;
    return s;
}

SourceModel SourceModel::from_grid(GridField f, const Differential& d) {
    if (f.domain.get() != d.domain().get())
        throw std::invalid_argument("SourceModel::from_grid: mismatched domains");
    SourceModel s;
    s.spatial_ = Spatial::GridBound;
    s.bound_dom_ = f.domain;
    VectorGrid gf = d.gradient(f.values);
    s.f_grid_ = std::move(f.values);
    s.fx_grid_ = std::move(gf.x);
    s.fy_grid_ = std::move(gf.y);
    s.shape_ = Shape::One;
    return s;
}

SourceModel SourceModel::custom_shape(std::function<double(double)> phi) {
    SourceModel s;
    s.spatial_ = Spatial::Constant;
    s.const_f_ = 1.0;
    s.shape_ = Shape::Custom;
    s.phi_ = std::move(phi);
    return s;
}

SourceModel SourceModel::with_primitive_offset(double g0) const {
    SourceModel s = *this;
    s.g0_ = g0;
    return s;
}

bool SourceModel::u_dependent_only() const { return spatial_ == Spatial::Constant; }

double SourceModel::spatial(double x, double y) const {
    switch (spatial_) {
        case Spatial::Constant: return const_f_;
        case Spatial::Analytic: return f_(x, y);
        case Spatial::GridBound:
            throw std::logic_error("SourceModel: grid-bound source needs node-indexed evaluation");
    }
    return 0.0;
}

double SourceModel::x_dot_grad_spatial(double x, double y) const {
    switch (spatial_) {
        case Spatial::Constant: return 0.0;
        case Spatial::Analytic: {
            Eigen::Vector2d g = grad_f_(x, y);
            return x * g[0] + y * g[1];
        }
        case Spatial::GridBound:
            throw std::logic_error("SourceModel: grid-bound source needs node-indexed evaluation");
    }
    return 0.0;
}

double SourceModel::phi(double s) const {
    switch (shape_) {
        case Shape::One: return 1.0;
        case Shape::Power: {
            // |s|^{m-1} s written as sign(s)|s|^m, finite for all m > 0
            const double sign = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
            return coeff_ * sign * std::pow(std::abs(s), m_);
        }
        case Shape::Custom: return phi_(s);
    }
    return 0.0;
}

double SourceModel::Phi(double t) const {
    switch (shape_) {
        case Shape::One: return t;
        case Shape::Power: return coeff_ * std::pow(std::abs(t), m_ + 1.0) / (m_ + 1.0);
        case Shape::Custom:
            if (t == 0.0) return 0.0;
            return adaptive_simpson(phi_, 0.0, t, 1e-12);
    }
    return 0.0;
}

double SourceModel::g(double x, double y, double s) const { return spatial(x, y) * phi(s); }

double SourceModel::G(double x, double y, double t) const {
    return spatial(x, y) * Phi(t) + g0_;
}

double SourceModel::x_dot_grad_G(double x, double y, double t) const {
    return x_dot_grad_spatial(x, y) * Phi(t);
}

double SourceModel::g_at(int i, int j, double s) const {
    if (spatial_ != Spatial::GridBound)
        throw std::logic_error("SourceModel::g_at: only grid-bound sources are node-indexed; use g(x,y,s)");
    return f_grid_(i, j) * phi(s);
}

double SourceModel::G_at(int i, int j, double t) const {
    if (spatial_ == Spatial::GridBound) return f_grid_(i, j) * Phi(t) + g0_;
    throw std::logic_error("SourceModel::G_at: only grid-bound sources are node-indexed");
}

double SourceModel::x_dot_grad_G_at(int i, int j, double t) const {
    if (spatial_ == Spatial::GridBound) {
        const double x = bound_dom_->xs()(i, j), y = bound_dom_->ys()(i, j);
        return (x * fx_grid_(i, j) + y * fy_grid_(i, j)) * Phi(t);
    }
    throw std::logic_error("SourceModel::x_dot_grad_G_at: only grid-bound sources are node-indexed");
}

// ------------------------------------------------------- manufactured pairs

ManufacturedSource manufactured_source(const GridField& u, const Profile& pr,
                                       const Anisotropy& a, const Differential& d) {
    OperatorFields f = operator_fields(u, pr, a, d);
    ManufacturedSource out;
    out.f.domain = u.domain;
    out.f.values = -d.divergence(f.stress);
    out.masked_fraction = f.mask.fraction;
    out.warning = f.mask.fraction > 0.01;
    return out;
}

double weak_residual(const GridField& u, const SourceModel& src, const Profile& pr,
                     const Anisotropy& a, const Differential& d, const AnalyticField& phi) {
    OperatorFields f = operator_fields(u, pr, a, d);
    const auto& dom = *u.domain;
    const auto& xs = dom.xs();
    const auto& ys = dom.ys();
    Grid lhs(dom.n_r(), dom.n_theta()), rhs(dom.n_r(), dom.n_theta());
    for (int i = 0; i < dom.n_r(); ++i)
        for (int j = 0; j < dom.n_theta(); ++j) {
            const Eigen::Vector2d gphi = phi.gradient(xs(i, j), ys(i, j));
            lhs(i, j) = f.stress.x(i, j) * gphi[0] + f.stress.y(i, j) * gphi[1];
            const double gv = src.grid_bound() ? src.g_at(i, j, u.values(i, j))
                                               : src.g(xs(i, j), ys(i, j), u.values(i, j));
            rhs(i, j) = gv * phi.value(xs(i, j), ys(i, j));
        }
    return dom.volume_sum(lhs) - dom.volume_sum(rhs);
}

std::vector<double> stress_sobolev_diagnostic(const std::function<double(double, double)>& u_fn,
                                              const Profile& pr, const Anisotropy& a,
                                              const StarDomain& base,
                                              std::span<const int> radial_resolutions,
                                              double interior_fraction) {
    std::vector<double> out;
    for (int nr : radial_resolutions) {
        const double ratio = static_cast<double>(nr - 1) / (base.n_r() - 1);
        int nt = static_cast<int>(std::lround(base.n_theta() * ratio));
        if (nt % 2) ++nt;
        nt = std::max(nt, 8);
        auto dom = base.with_resolution(nr, nt);
        Differential diff(dom);
        GridField u = GridField::sample(dom, u_fn);
        OperatorFields f = operator_fields(u, pr, a, diff);
        VectorGrid g1 = diff.gradient(f.stress.x);
        VectorGrid g2 = diff.gradient(f.stress.y);
        Grid integrand =
            g1.x.square() + g1.y.square() + g2.x.square() + g2.y.square();
        for (int i = 0; i < dom->n_r(); ++i)
            if (dom->s(i) > interior_fraction) integrand.row(i).setZero();
        out.push_back(dom->volume_sum(integrand));
    }
    return out;
}

}  // namespace finsler
