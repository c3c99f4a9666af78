#include "finslerlab/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace finsler {

namespace {

constexpr double kDim = 2.0;  // quadrature dimension

double seven_term_scale(const IdentityReport& r) {
    double s = 0.0;
    for (double t : {r.vol_n_G, r.vol_x_grad_G, r.vol_minus_n_B, r.vol_bprime_H, r.bdy_G_xeta,
                     r.bdy_minus_B_xeta, r.bdy_stress_xgradu_eta})
        s = std::max(s, std::abs(t));
    return s;
}

void finalize(IdentityReport& r) {
    r.lhs = r.vol_n_G + r.vol_x_grad_G + r.vol_minus_n_B + r.vol_bprime_H;
    r.rhs = r.bdy_G_xeta + r.bdy_minus_B_xeta + r.bdy_stress_xgradu_eta;
    r.residual_abs = std::abs(r.lhs - r.rhs);
    const double s = seven_term_scale(r);
    r.residual_rel = s > 0.0 ? r.residual_abs / s : r.residual_abs;
}

double source_G(const SourceModel& src, const StarDomain& dom, int i, int j, double t) {
    return src.grid_bound() ? src.G_at(i, j, t) : src.G(dom.xs()(i, j), dom.ys()(i, j), t);
}

double source_xgradG(const SourceModel& src, const StarDomain& dom, int i, int j, double t) {
    return src.grid_bound() ? src.x_dot_grad_G_at(i, j, t)
                            : src.x_dot_grad_G(dom.xs()(i, j), dom.ys()(i, j), t);
}

}  // namespace

IdentityReport identity_sides(const GridField& u, const SourceModel& src, const Profile& pr,
                              const Anisotropy& a, const Differential& d) {
    const auto& dom = *u.domain;
    if (src.grid_bound() && src.bound_domain().get() != u.domain.get())
        throw std::invalid_argument("identity_sides: source bound to a different grid");
    OperatorFields of = operator_fields(u, pr, a, d);

    const int nr = dom.n_r(), nt = dom.n_theta();
    Grid Gv(nr, nt), xg(nr, nt);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            Gv(i, j) = source_G(src, dom, i, j, u.values(i, j));
            xg(i, j) = source_xgradG(src, dom, i, j, u.values(i, j));
        }

    IdentityReport r;
    r.n_r = nr;
    r.n_theta = nt;
    r.masked_fraction = of.mask.fraction;
    r.vol_n_G = kDim * dom.volume_sum(Gv);
    r.vol_x_grad_G = dom.volume_sum(xg);
    r.vol_minus_n_B = -kDim * dom.volume_sum(of.B);
    r.vol_bprime_H = dom.volume_sum(of.dB * of.H);

    const int e = nr - 1;
    Eigen::ArrayXd b1(nt), b2(nt), b3(nt);
    for (int j = 0; j < nt; ++j) {
        const double x = dom.xs()(e, j), y = dom.ys()(e, j);
        const double etx = dom.normal_x()[j], ety = dom.normal_y()[j];
        const double xeta = x * etx + y * ety;
        b1[j] = source_G(src, dom, e, j, u.values(e, j)) * xeta;
        b2[j] = -of.B(e, j) * xeta;
        if (of.mask.masked(e, j)) {
            b3[j] = 0.0;
        } else {
            const auto ev = a.evaluate2(of.grad.x(e, j), of.grad.y(e, j));
            const double xgu = x * of.grad.x(e, j) + y * of.grad.y(e, j);
            b3[j] = of.dB(e, j) * xgu * (ev.gx * etx + ev.gy * ety);
        }
    }
    r.bdy_G_xeta = dom.boundary_sum(b1);
    r.bdy_minus_B_xeta = dom.boundary_sum(b2);
    r.bdy_stress_xgradu_eta = dom.boundary_sum(b3);
    finalize(r);
    return r;
}

IdentityReport classical_plap_form(const GridField& u, const SourceModel& src, const Profile& pr,
                                   const Anisotropy& a, const Differential& d) {
    if (pr.kind() != ProfileKind::Power)
        throw WrongSpecialization("classical_plap_form: profile must be power");
    if (a.kind() != AnisotropyKind::Euclidean)
        throw WrongSpecialization("classical_plap_form: anisotropy must be euclidean");
    if (!src.u_dependent_only())
        throw WrongSpecialization("classical_plap_form: source must be g = g(u)");

    const auto& dom = *u.domain;
    const double p = pr.p();
    VectorGrid grad = d.gradient(u.values);
    const int nr = dom.n_r(), nt = dom.n_theta();
    const Grid mag = (grad.x.square() + grad.y.square()).sqrt();
    const double floor = 1e-10 * mag.maxCoeff();  // same mask rule as operator_fields

    Grid Gv(nr, nt), magp = Grid::Zero(nr, nt);
    long masked = 0;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            Gv(i, j) = src.G(dom.xs()(i, j), dom.ys()(i, j), u.values(i, j));
            if (mag(i, j) <= floor) {
                ++masked;
                continue;
            }
            magp(i, j) = std::pow(mag(i, j), p);
        }

    IdentityReport r;
    r.n_r = nr;
    r.n_theta = nt;
    r.masked_fraction = static_cast<double>(masked) / (static_cast<double>(nr) * nt);
    r.vol_n_G = kDim * dom.volume_sum(Gv);
    r.vol_x_grad_G = 0.0;
    r.vol_minus_n_B = -kDim / p * dom.volume_sum(magp);
    r.vol_bprime_H = dom.volume_sum(magp);

    const int e = nr - 1;
    Eigen::ArrayXd b1(nt), b2(nt), b3(nt);
    for (int j = 0; j < nt; ++j) {
        const double x = dom.xs()(e, j), y = dom.ys()(e, j);
        const double etx = dom.normal_x()[j], ety = dom.normal_y()[j];
        const double xeta = x * etx + y * ety;
        b1[j] = src.G(x, y, u.values(e, j)) * xeta;
        b2[j] = -magp(e, j) / p * xeta;
        if (mag(e, j) <= floor) {
            b3[j] = 0.0;
        } else {
            const double xgu = x * grad.x(e, j) + y * grad.y(e, j);
            const double ueta = grad.x(e, j) * etx + grad.y(e, j) * ety;
            b3[j] = std::pow(mag(e, j), p - 2.0) * xgu * ueta;
        }
    }
    r.bdy_G_xeta = dom.boundary_sum(b1);
    r.bdy_minus_B_xeta = dom.boundary_sum(b2);
    r.bdy_stress_xgradu_eta = dom.boundary_sum(b3);
    finalize(r);
    return r;
}

DirichletReduction dirichlet_boundary_reduction(const GridField& u, const SourceModel& src,
                                                const Profile& pr, const Anisotropy& a,
                                                const Differential& d) {
    const auto& dom = *u.domain;
    const double scale = std::max(1.0, u.values.abs().maxCoeff());
    if (u.max_abs_boundary_trace() > 1e-10 * scale)
        throw TraceNotZero("dirichlet_boundary_reduction: boundary trace exceeds tolerance");

    OperatorFields of = operator_fields(u, pr, a, d);
    const int e = dom.n_r() - 1, nt = dom.n_theta();
    Eigen::ArrayXd reduced(nt), unreduced(nt), powerform(nt);
    for (int j = 0; j < nt; ++j) {
        const double x = dom.xs()(e, j), y = dom.ys()(e, j);
        const double etx = dom.normal_x()[j], ety = dom.normal_y()[j];
        const double xeta = x * etx + y * ety;
        const double G0 = src.grid_bound() ? src.G_at(e, j, 0.0) : src.G(x, y, 0.0);
        reduced[j] = (G0 - of.B(e, j) + of.dB(e, j) * of.H(e, j)) * xeta;
        double b3 = 0.0;
        if (!of.mask.masked(e, j)) {
            const auto ev = a.evaluate2(of.grad.x(e, j), of.grad.y(e, j));
            const double xgu = x * of.grad.x(e, j) + y * of.grad.y(e, j);
            b3 = of.dB(e, j) * xgu * (ev.gx * etx + ev.gy * ety);
        }
        const double Gu = src.grid_bound() ? src.G_at(e, j, u.values(e, j))
                                           : src.G(x, y, u.values(e, j));
        unreduced[j] = Gu * xeta - of.B(e, j) * xeta + b3;
        powerform[j] = std::pow(of.H(e, j), pr.p()) * xeta;
    }
    DirichletReduction out;
    out.reduced = dom.boundary_sum(reduced);
    out.unreduced = dom.boundary_sum(unreduced);
    out.power_form = pr.kind() == ProfileKind::Power
                         ? (pr.p() - 1.0) / pr.p() * dom.boundary_sum(powerform)
                         : std::numeric_limits<double>::quiet_NaN();
    const double s = std::max(std::abs(out.reduced), std::abs(out.unreduced));
    out.rel_diff = s > 0.0 ? std::abs(out.reduced - out.unreduced) / s
                           : std::abs(out.reduced - out.unreduced);
    return out;
}

NonexistenceReport nonexistence_scan(const SourceModel& src, const Profile& pr,
                                     const Anisotropy& a, const StarDomain& dom,
                                     std::span<const double> t_grid, int n_directions) {
    // q(x, w, t) = G(x,0) + [B'(tH(w)) tH(w) - B(tH(w))]: the two pieces are
    // additively independent, so the minimum splits.
    double min_G = std::numeric_limits<double>::infinity();
    const int e = dom.n_r() - 1;
    for (int j = 0; j < dom.n_theta(); ++j) {
        const double G0 = src.grid_bound() ? src.G_at(e, j, 0.0)
                                           : src.G(dom.xs()(e, j), dom.ys()(e, j), 0.0);
        min_G = std::min(min_G, G0);
    }
    double min_psi = std::numeric_limits<double>::infinity();
    double term_scale = 0.0;
    for (int k = 0; k < n_directions; ++k) {
        const double ang = 2.0 * M_PI * k / n_directions;
        Eigen::VectorXd w(2);
        w << std::cos(ang), std::sin(ang);
        const double Hw = a.value(w);
        for (double t : t_grid) {
            const double s = t * Hw;
            const auto b = pr.evaluate(s);
            const double psi = b.dB * s - b.B;
            min_psi = std::min(min_psi, psi);
            term_scale = std::max({term_scale, std::abs(b.B), std::abs(b.dB * s)});
        }
    }
    NonexistenceReport r;
    r.min_value = min_G + min_psi;
    r.tolerance = 1e-12 * std::max(term_scale, std::abs(min_G));
    r.condition_holds = r.min_value >= -r.tolerance;
    return r;
}

double critical_exponent(double p, double N) {
    if (!(p > 1.0) || !(p < N))
        throw SupercriticalDimensionPair("critical_exponent: requires 1 < p < N");
    return (N * (p - 1.0) + p) / (N - p);
}

double subcritical_functional(const GridField& u, const SourceModel& src, const Profile& pr,
                              const Anisotropy& a, const Differential& d, double N_dim) {
    (void)a;
    (void)d;
    if (pr.kind() != ProfileKind::Power)
        throw WrongSpecialization("subcritical_functional: profile must be power");
    if (!src.u_dependent_only())
        throw WrongSpecialization("subcritical_functional: source must be g = g(u)");
    const double scale = std::max(1.0, u.values.abs().maxCoeff());
    if (u.max_abs_boundary_trace() > 1e-10 * scale)
        throw TraceNotZero("subcritical_functional: boundary trace exceeds tolerance");

    const auto& dom = *u.domain;
    const int nr = dom.n_r(), nt = dom.n_theta();
    Grid Gv(nr, nt), gu(nr, nt);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            const double x = dom.xs()(i, j), y = dom.ys()(i, j);
            const double t = u.values(i, j);
            Gv(i, j) = src.G(x, y, t);
            gu(i, j) = src.g(x, y, t) * t;
        }
    const double p = pr.p();
    return N_dim * dom.volume_sum(Gv) - (N_dim - p) / p * dom.volume_sum(gu);
}

WholespaceReport wholespace_check(const AnalyticField& u, double support_radius,
                                  const Profile& pr, const Anisotropy& a, double grid_radius,
                                  int n_r, int n_theta, std::span<const double> radii) {
    if (pr.kappa() != 0.0)
        throw std::invalid_argument("wholespace_check: requires kappa = 0 in the profile");
    if (support_radius > grid_radius)
        throw SupportEscapesGrid("wholespace_check: support radius exceeds the grid radius");

    auto dom = StarDomain::disk(grid_radius, n_r, n_theta);
    Differential diff(dom);
    GridField uh = GridField::sample(dom, u.value);
    OperatorFields of = operator_fields(uh, pr, a, diff);
    GridField f;
    f.domain = dom;
    f.values = -diff.divergence(of.stress);
    SourceModel src = SourceModel::from_grid(f, diff);

    const int nr = dom->n_r(), nt = dom->n_theta();
    Grid Gts(nr, nt), xgs(nr, nt);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            Gts(i, j) = src.G_at(i, j, uh.values(i, j));
            xgs(i, j) = src.x_dot_grad_G_at(i, j, uh.values(i, j));
        }
    const double intG = dom->volume_sum(Gts);
    const double intXG = dom->volume_sum(xgs);
    const double intB = dom->volume_sum(of.B);
    const double intBH = dom->volume_sum(of.dB * of.H);

    WholespaceReport r;
    r.masked_fraction = of.mask.fraction;
    r.lhs = kDim * intG + intXG;
    r.lhs_alt_sign = kDim * intG - intXG;
    r.rhs = kDim * intB - intBH;
    r.term_scale = std::max({std::abs(kDim * intG), std::abs(intXG), std::abs(kDim * intB),
                             std::abs(intBH)});
    const double s = std::max(r.term_scale, 1e-300);
    r.residual_rel = std::abs(r.lhs - r.rhs) / s;
    r.residual_alt_rel = std::abs(r.lhs_alt_sign - r.rhs) / s;

    for (double rad : radii) {
        // snap to the nearest grid ring so the discrete f is available there
        int i = static_cast<int>(std::lround(rad / grid_radius * (n_r - 1)));
        i = std::clamp(i, 1, n_r - 1);
        const double ri = dom->s(i) * grid_radius;
        double acc = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double x = dom->xs()(i, j), y = dom->ys()(i, j);
            const Eigen::Vector2d g = u.gradient(x, y);
            double Bv = 0.0;
            if (g.norm() > 1e-14) Bv = pr.B(a.value(g));
            const double Gv = src.G_at(i, j, u.value(x, y));
            acc += (Bv + std::abs(Gv)) * dom->dtheta() * ri;
        }
        r.decay.emplace_back(ri, ri * acc);
    }
    return r;
}

}  // namespace finsler
