#include "finslerlab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

// ------------------------------------------------------------ torsion oracle

TorsionOracle torsion_oracle(double p, double N, double R) {
    if (!(p > 1.0) || !(N >= 1.0) || !(R > 0.0))
        throw std::invalid_argument("torsion_oracle: requires p > 1, N >= 1, R > 0");
    return TorsionOracle{p, N, R};
}

double TorsionOracle::value(double r) const {
    const double q = p / (p - 1.0);
    return (p - 1.0) / p * std::pow(N, -1.0 / (p - 1.0)) * (std::pow(R, q) - std::pow(r, q));
}

double TorsionOracle::dvalue(double r) const {
    return -std::pow(N, -1.0 / (p - 1.0)) * std::pow(r, 1.0 / (p - 1.0));
}

double TorsionOracle::operator()(double x, double y) const {
    return value(std::sqrt(x * x + y * y));
}

AnalyticField TorsionOracle::field() const {
    TorsionOracle self = *this;
    AnalyticField f;
    f.value = [self](double x, double y) { return self(x, y); };
    f.gradient = [self](double x, double y) {
        const double r = std::sqrt(x * x + y * y);
        if (r == 0.0) return Eigen::Vector2d(0.0, 0.0);
        const double d = self.dvalue(r);
        return Eigen::Vector2d(d * x / r, d * y / r);
    };
    return f;
}

// ------------------------------------------------------------------- energy

namespace {

struct Workspace {
    std::shared_ptr<const StarDomain> dom;
    const Differential* diff;
    const SourceModel* src;
    int nr, nt, ndof;

    Grid to_grid(const Eigen::VectorXd& dofs) const {
        Grid v(nr, nt);
        v.row(0).setConstant(dofs[0]);
        for (int i = 1; i <= nr - 2; ++i)
            for (int j = 0; j < nt; ++j) v(i, j) = dofs[1 + (i - 1) * nt + j];
        v.row(nr - 1).setZero();
        return v;
    }

    Eigen::VectorXd collapse(const Grid& g) const {
        Eigen::VectorXd d(ndof);
        d[0] = g.row(0).sum();
        for (int i = 1; i <= nr - 2; ++i)
            for (int j = 0; j < nt; ++j) d[1 + (i - 1) * nt + j] = g(i, j);
        return d;
    }

    double source_g(int i, int j, double s) const {
        return src->grid_bound() ? src->g_at(i, j, s)
                                 : src->g(dom->xs()(i, j), dom->ys()(i, j), s);
    }
    double source_G(int i, int j, double t) const {
        return src->grid_bound() ? src->G_at(i, j, t)
                                 : src->G(dom->xs()(i, j), dom->ys()(i, j), t);
    }
};

double energy_of_grid(const Workspace& w, const Profile& pr, const Anisotropy& a,
                      const Grid& v) {
    VectorGrid grad = w.diff->gradient(v);
    const Grid mag = (grad.x.square() + grad.y.square()).sqrt();
    const double floor = 1e-10 * mag.maxCoeff();
    double acc = 0.0;
    const auto& wv = w.dom->volume_weights();
    for (int i = 0; i < w.nr; ++i)
        for (int j = 0; j < w.nt; ++j) {
            double Bv = 0.0;
            if (mag(i, j) > floor) {
                const auto e = a.evaluate2(grad.x(i, j), grad.y(i, j));
                Bv = pr.B(e.H);
            }
            acc += (Bv - w.source_G(i, j, v(i, j))) * wv(i, j);
        }
    return acc;
}

Eigen::VectorXd energy_gradient(const Workspace& w, const Profile& pr, const Anisotropy& a,
                                const Grid& v) {
    VectorGrid grad = w.diff->gradient(v);
    const Grid mag = (grad.x.square() + grad.y.square()).sqrt();
    const double floor = 1e-10 * mag.maxCoeff();
    const auto& wv = w.dom->volume_weights();
    VectorGrid ws{Grid::Zero(w.nr, w.nt), Grid::Zero(w.nr, w.nt)};
    Grid gterm(w.nr, w.nt);
    for (int i = 0; i < w.nr; ++i)
        for (int j = 0; j < w.nt; ++j) {
            if (mag(i, j) > floor) {
                const auto e = a.evaluate2(grad.x(i, j), grad.y(i, j));
                const double db = pr.dB(e.H);
                ws.x(i, j) = wv(i, j) * db * e.gx;
                ws.y(i, j) = wv(i, j) * db * e.gy;
            }
            gterm(i, j) = wv(i, j) * w.source_g(i, j, v(i, j));
        }
    Grid out = w.diff->gradient_adjoint(ws) - gterm;
    return w.collapse(out);
}

}  // namespace

double energy(const GridField& u, const SourceModel& src, const Profile& pr,
              const Anisotropy& a, const Differential& d) {
    Workspace w{u.domain, &d, &src, {}, u.domain->n_r(), u.domain->n_theta(), 0};
    return energy_of_grid(w, pr, a, u.values);
}

// ------------------------------------------------------------------- solver

namespace {

struct StageResult {
    int iterations = 0;
    double final_energy = 0.0;
    double scaled_norm = 0.0;
    bool converged = false;
};

StageResult minimize_stage(const Workspace& w, const Profile& pr, const Anisotropy& a,
                           const SolverConfig& cfg, Eigen::VectorXd& u) {
    // Preconditioner: dof quadrature weights (center gets the first-ring sum).
    Eigen::VectorXd diag(w.ndof);
    {
        const auto& wv = w.dom->volume_weights();
        double wc = 0.0;
        for (int j = 0; j < w.nt; ++j) wc += wv(1, j);
        diag[0] = wc;
        for (int i = 1; i <= w.nr - 2; ++i)
            for (int j = 0; j < w.nt; ++j) diag[1 + (i - 1) * w.nt + j] = wv(i, j);
    }
    // Scale for the convergence test: sup |g(x, u0)| with 1 as a floor.
    double gscale = 1.0;
    {
        Grid v = w.to_grid(u);
        for (int i = 0; i < w.nr; ++i)
            for (int j = 0; j < w.nt; ++j)
                gscale = std::max(gscale, std::abs(w.source_g(i, j, v(i, j))));
    }

    auto scaled_sup = [&](const Eigen::VectorXd& g) {
        double m = 0.0;
        for (int k = 0; k < w.ndof; ++k) m = std::max(m, std::abs(g[k]) / diag[k]);
        return m;
    };

    StageResult res;
    Grid v = w.to_grid(u);
    double E0 = energy_of_grid(w, pr, a, v);
    Eigen::VectorXd g = energy_gradient(w, pr, a, v);
    Eigen::VectorXd pg = g.cwiseQuotient(diag);
    Eigen::VectorXd dir = -pg;
    double gpg = g.dot(pg);
    double alpha_prev = 0.0;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        res.scaled_norm = scaled_sup(g);
        if (res.scaled_norm <= cfg.gradient_tolerance * gscale) {
            res.converged = true;
            break;
        }
        double gd = g.dot(dir);
        if (gd >= 0.0) {  // not a descent direction: restart
            dir = -pg;
            gd = g.dot(dir);
        }

        // Quadratic-fit trial step (exact line minimum for quadratic energies).
        double alpha0 = alpha_prev > 0.0 ? alpha_prev : 1.0;
        Grid v1 = w.to_grid(u + alpha0 * dir);
        double E1 = energy_of_grid(w, pr, a, v1);
        double denom = 2.0 * (E1 - E0 - alpha0 * gd);
        double alpha = denom > 0.0 ? -gd * alpha0 * alpha0 / denom : alpha0;
        if (!(alpha > 0.0) || !std::isfinite(alpha)) alpha = alpha0;

        // Armijo backtracking from the trial step.
        double Enew = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 120; ++bt) {
            Grid vt = w.to_grid(u + alpha * dir);
            Enew = energy_of_grid(w, pr, a, vt);
            if (Enew <= E0 + cfg.sufficient_decrease * alpha * gd) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack_factor;
        }
        if (!accepted) throw LineSearchFailure("solve_dirichlet: line search failed to decrease energy");

        u += alpha * dir;
        alpha_prev = alpha;
        E0 = Enew;
        ++res.iterations;

        Eigen::VectorXd g_new = energy_gradient(w, pr, a, w.to_grid(u));
        Eigen::VectorXd pg_new = g_new.cwiseQuotient(diag);
        const double gpg_new = g_new.dot(pg_new);
        double beta = (g_new - g).dot(pg_new) / gpg;  // Polak-Ribiere+
        beta = std::max(0.0, beta);
        if ((it + 1) % 250 == 0) beta = 0.0;  // periodic restart
        dir = -pg_new + beta * dir;
        g.swap(g_new);
        pg.swap(pg_new);
        gpg = gpg_new;
    }
    res.final_energy = E0;
    return res;
}

}  // namespace

SolveResult solve_dirichlet(const SourceModel& src, const Profile& pr, const Anisotropy& a,
                            std::shared_ptr<const StarDomain> dom, const SolverConfig& cfg) {
    // Coercivity gate (spec rule): x-only sources, or power g with m < p-1.
    if (src.is_power()) {
        if (!(src.power_exponent() < pr.p() - 1.0))
            throw NotCoercive("solve_dirichlet: power source needs m < p-1");
    } else if (!src.x_dependent_only()) {
        throw NotCoercive("solve_dirichlet: source class rejected (not coercive)");
    }
    if (!(cfg.gradient_tolerance > 0.0))
        throw std::invalid_argument("solve_dirichlet: tolerances must be positive");

    Differential diff(dom);
    Workspace w;
    w.dom = dom;
    w.diff = &diff;
    w.src = &src;
    w.nr = dom->n_r();
    w.nt = dom->n_theta();
    w.ndof = 1 + (w.nr - 2) * w.nt;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(w.ndof);

    // Power nonlinearities vanish at u = 0, which is a critical point of the
    // energy; seed with a bump scaled to the 1D line minimum.
    if (src.is_power()) {
        Eigen::VectorXd bump(w.ndof);
        bump[0] = 1.0;
        for (int i = 1; i <= w.nr - 2; ++i) {
            const double s = dom->s(i);
            for (int j = 0; j < w.nt; ++j) bump[1 + (i - 1) * w.nt + j] = 1.0 - s * s;
        }
        Profile pstage = pr;
        Grid vb = w.to_grid(bump);
        VectorGrid gb = diff.gradient(vb);
        double A = 0.0, C = 0.0;
        const auto& wv = dom->volume_weights();
        for (int i = 0; i < w.nr; ++i)
            for (int j = 0; j < w.nt; ++j) {
                const double m2 = gb.x(i, j) * gb.x(i, j) + gb.y(i, j) * gb.y(i, j);
                if (m2 > 0.0) A += pstage.B(a.evaluate2(gb.x(i, j), gb.y(i, j)).H) * wv(i, j);
                C += w.source_G(i, j, vb(i, j)) * wv(i, j);
            }
        const double m = src.power_exponent();
        if (A > 0.0 && C > 0.0) {
            const double delta =
                std::pow(C * (m + 1.0) / (A * pr.p()), 1.0 / (pr.p() - m - 1.0));
            u = delta * bump;
        } else {
            u = 0.1 * bump;
        }
    }

    SolveResult out;
    // kappa continuation stages, then the target profile.
    std::vector<Profile> stages;
    if (cfg.kappa_steps > 0 && cfg.kappa_start > 0.0) {
        double k = cfg.kappa_start;
        for (int s = 0; s < cfg.kappa_steps; ++s) {
            stages.push_back(Profile::regularized(pr.p(), std::min(k, 1.0)));
            k *= cfg.kappa_factor;
        }
    }
    stages.push_back(pr);

    StageResult last;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        last = minimize_stage(w, stages[s], a, cfg, u);
        out.kappa_path.push_back(stages[s].kappa());
        out.stage_energies.push_back(last.final_energy);
        out.iterations += last.iterations;
    }
    if (!last.converged)
        throw MaxIterations("solve_dirichlet: gradient tolerance not reached within max_iterations");

    out.u.domain = dom;
    out.u.values = w.to_grid(u);
    out.final_energy = last.final_energy;
    out.final_gradient_norm = last.scaled_norm;
    out.converged = last.converged;
    return out;
}

}  // namespace finsler
