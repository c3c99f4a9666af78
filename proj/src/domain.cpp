#include "finslerlab/domain.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

namespace {

double eval_rho(const StarDomain::RadiusSpec& spec, double theta) {
    if (const auto* f = std::get_if<StarDomain::FourierRadius>(&spec)) {
        double r = 0.0;
        for (std::size_t k = 0; k < f->cos_coeffs.size(); ++k)
            r += f->cos_coeffs[k] * std::cos(static_cast<double>(k) * theta);
        for (std::size_t k = 0; k < f->sin_coeffs.size(); ++k)
            r += f->sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * theta);
        return r;
    }
    const auto& e = std::get<StarDomain::EllipseRadius>(spec);
    const double c = std::cos(theta), s = std::sin(theta);
    return e.a * e.b / std::sqrt(e.b * e.b * c * c + e.a * e.a * s * s);
}

double eval_drho(const StarDomain::RadiusSpec& spec, double theta) {
    if (const auto* f = std::get_if<StarDomain::FourierRadius>(&spec)) {
        double r = 0.0;
        for (std::size_t k = 1; k < f->cos_coeffs.size(); ++k)
            r -= f->cos_coeffs[k] * static_cast<double>(k) * std::sin(static_cast<double>(k) * theta);
        for (std::size_t k = 0; k < f->sin_coeffs.size(); ++k)
            r += f->sin_coeffs[k] * static_cast<double>(k + 1) * std::cos(static_cast<double>(k + 1) * theta);
        return r;
    }
    const auto& e = std::get<StarDomain::EllipseRadius>(spec);
    const double c = std::cos(theta), s = std::sin(theta);
    const double u = e.b * e.b * c * c + e.a * e.a * s * s;
    const double du = 2.0 * (e.a * e.a - e.b * e.b) * s * c;
    return -0.5 * e.a * e.b * du / (u * std::sqrt(u));
}

}  // namespace

StarDomain::StarDomain(RadiusSpec spec, int n_r, int n_theta)
    : spec_(std::move(spec)), n_r_(n_r), n_theta_(n_theta) {
    if (n_r_ < 5) throw std::invalid_argument("star domain: n_r must be >= 5");
    if (n_theta_ < 8 || n_theta_ % 2 != 0)
        throw std::invalid_argument("star domain: n_theta must be even and >= 8");

    const int dense = std::max(8 * n_theta_, 4096);
    min_rho_ = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dense; ++k)
        min_rho_ = std::min(min_rho_, eval_rho(spec_, 2.0 * M_PI * k / dense));
    valid_ = min_rho_ > 0.0;
    if (!valid_) return;

    rho_.resize(n_theta_);
    drho_.resize(n_theta_);
    wbdy_.resize(n_theta_);
    nx_.resize(n_theta_);
    ny_.resize(n_theta_);
    for (int j = 0; j < n_theta_; ++j) {
        const double th = theta(j);
        rho_[j] = eval_rho(spec_, th);
        drho_[j] = eval_drho(spec_, th);
        const double arc = std::sqrt(rho_[j] * rho_[j] + drho_[j] * drho_[j]);
        wbdy_[j] = dtheta() * arc;
        const double c = std::cos(th), s = std::sin(th);
        nx_[j] = (rho_[j] * c + drho_[j] * s) / arc;
        ny_[j] = (rho_[j] * s - drho_[j] * c) / arc;
    }

    xs_.resize(n_r_, n_theta_);
    ys_.resize(n_r_, n_theta_);
    wvol_.resize(n_r_, n_theta_);
    P_.resize(n_r_, n_theta_);
    Q_.resize(n_r_, n_theta_);
    R_.resize(n_r_, n_theta_);
    T_.resize(n_r_, n_theta_);
    P_.setZero();
    Q_.setZero();
    R_.setZero();
    T_.setZero();
    for (int i = 0; i < n_r_; ++i) {
        const double si = s(i);
        const double tw = (i == 0 || i == n_r_ - 1) ? 0.5 * ds() : ds();
        for (int j = 0; j < n_theta_; ++j) {
            const double th = theta(j);
            const double c = std::cos(th), sn = std::sin(th);
            xs_(i, j) = si * rho_[j] * c;
            ys_(i, j) = si * rho_[j] * sn;
            wvol_(i, j) = tw * dtheta() * si * rho_[j] * rho_[j];
            if (i >= 1) {
                // J columns: d(x,y)/ds = rho (c, sn); d(x,y)/dtheta = s (rho' c - rho sn, rho' sn + rho c)
                const double a = rho_[j] * c;
                const double cc = rho_[j] * sn;
                const double b = si * (drho_[j] * c - rho_[j] * sn);
                const double d = si * (drho_[j] * sn + rho_[j] * c);
                const double det = si * rho_[j] * rho_[j];
                P_(i, j) = d / det;
                Q_(i, j) = -cc / det;
                R_(i, j) = -b / det;
                T_(i, j) = a / det;
            }
        }
    }
}

std::shared_ptr<const StarDomain> StarDomain::disk(double radius, int n_r, int n_theta) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk: radius must be positive");
    FourierRadius f;
    f.cos_coeffs = {radius};
    return std::make_shared<StarDomain>(RadiusSpec(std::move(f)), n_r, n_theta);
}

std::shared_ptr<const StarDomain> StarDomain::ellipse(double a, double b, int n_r, int n_theta) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse: semi-axes must be positive");
    return std::make_shared<StarDomain>(RadiusSpec(EllipseRadius{a, b}), n_r, n_theta);
}

std::shared_ptr<const StarDomain> StarDomain::fourier(std::vector<double> cos_coeffs,
                                                      std::vector<double> sin_coeffs,
                                                      int n_r, int n_theta) {
    if (cos_coeffs.empty()) throw std::invalid_argument("fourier: need at least the constant term");
    FourierRadius f{std::move(cos_coeffs), std::move(sin_coeffs)};
    return std::make_shared<StarDomain>(RadiusSpec(std::move(f)), n_r, n_theta);
}

std::shared_ptr<const StarDomain> StarDomain::with_resolution(int n_r, int n_theta) const {
    return std::make_shared<StarDomain>(spec_, n_r, n_theta);
}

double StarDomain::rho(double theta) const { return eval_rho(spec_, theta); }
double StarDomain::drho(double theta) const { return eval_drho(spec_, theta); }

Eigen::Vector2d StarDomain::boundary_point(double theta) const {
    const double r = rho(theta);
    return {r * std::cos(theta), r * std::sin(theta)};
}

Eigen::Vector2d StarDomain::outward_normal(double theta) const {
    const double r = rho(theta), dr = drho(theta);
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Vector2d n(r * c + dr * s, r * s - dr * c);
    return n / n.norm();
}

StarShapeReport StarDomain::star_shape_classify() const {
    const int dense = std::max(8 * n_theta_, 4096);
    double mn = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (int k = 0; k < dense; ++k) {
        const double th = 2.0 * M_PI * k / dense;
        const double r = eval_rho(spec_, th);
        const double dr = eval_drho(spec_, th);
        const double arc = std::sqrt(r * r + dr * dr);
        // x.eta = rho^2 / sqrt(rho^2 + rho'^2) for the parametric normal;
        // the sign factor flags radius functions that lose positivity.
        const double v = (r >= 0.0 ? 1.0 : -1.0) * r * r / arc;
        mn = std::min(mn, v);
        scale = std::max(scale, std::abs(r));
    }
    StarShapeReport rep;
    rep.min_x_dot_eta = mn;
    const double tol = 1e-10 * std::max(scale, 1.0);
    if (mn > tol)
        rep.classification = StarShapeClass::StrictlyStarShaped;
    else if (mn >= -tol)
        rep.classification = StarShapeClass::StarShaped;
    else
        rep.classification = StarShapeClass::NotStarShaped;
    return rep;
}

double StarDomain::integrate_volume(const std::function<double(double, double)>& f) const {
    require_valid();
    double acc = 0.0;
    for (int i = 0; i < n_r_; ++i)
        for (int j = 0; j < n_theta_; ++j)
            acc += f(xs_(i, j), ys_(i, j)) * wvol_(i, j);
    return acc;
}

double StarDomain::integrate_boundary(const std::function<double(double, double)>& f) const {
    require_valid();
    double acc = 0.0;
    for (int j = 0; j < n_theta_; ++j) {
        const double r = rho_[j];
        acc += f(r * std::cos(theta(j)), r * std::sin(theta(j))) * wbdy_[j];
    }
    return acc;
}

double StarDomain::volume_sum(const Grid& node_values) const {
    require_valid();
    double acc = 0.0;
    for (int i = 0; i < n_r_; ++i)
        for (int j = 0; j < n_theta_; ++j)
            acc += node_values(i, j) * wvol_(i, j);
    return acc;
}

double StarDomain::boundary_sum(const Eigen::ArrayXd& per_theta_values) const {
    require_valid();
    double acc = 0.0;
    for (int j = 0; j < n_theta_; ++j) acc += per_theta_values[j] * wbdy_[j];
    return acc;
}

QuadratureRule StarDomain::volume_rule() const {
    require_valid();
    QuadratureRule q;
    q.kind = QuadratureRule::Kind::Volume;
    q.x.reserve(n_r_ * n_theta_);
    for (int i = 0; i < n_r_; ++i)
        for (int j = 0; j < n_theta_; ++j) {
            q.x.push_back(xs_(i, j));
            q.y.push_back(ys_(i, j));
            q.w.push_back(wvol_(i, j));
        }
    return q;
}

QuadratureRule StarDomain::boundary_rule() const {
    require_valid();
    QuadratureRule q;
    q.kind = QuadratureRule::Kind::Boundary;
    for (int j = 0; j < n_theta_; ++j) {
        q.x.push_back(rho_[j] * std::cos(theta(j)));
        q.y.push_back(rho_[j] * std::sin(theta(j)));
        q.w.push_back(wbdy_[j]);
    }
    return q;
}

}  // namespace finsler
