#include "finslerlab/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace finsler {

namespace {

// Deterministic direction sweep: golden-angle sequence on S^{N-1}.
// For N=2 this is a low-discrepancy angular sweep; for N>=3 we mix a
// Fibonacci-type lattice with the seeded random refinement done by callers.
Eigen::VectorXd sweep_direction(int k, int n, int dim) {
    Eigen::VectorXd w(dim);
    if (dim == 2) {
        const double golden = 0.6180339887498948;
        double t = std::fmod(static_cast<double>(k) * golden, 1.0);
        double ang = 2.0 * M_PI * (static_cast<double>(k) + t) / n;
        w << std::cos(ang), std::sin(ang);
        return w;
    }
    // Fibonacci sphere for N=3; hash-lattice fallback for higher N.
    if (dim == 3) {
        double z = 1.0 - 2.0 * (k + 0.5) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double ang = 2.0 * M_PI * k * 0.6180339887498948;
        w << r * std::cos(ang), r * std::sin(ang), z;
        return w;
    }
    std::mt19937_64 g(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(k));
    std::normal_distribution<double> nd;
    for (int i = 0; i < dim; ++i) w[i] = nd(g);
    w.normalize();
    return w;
}

}  // namespace

Anisotropy Anisotropy::euclidean(int dimension) {
    if (dimension < 2) throw std::invalid_argument("anisotropy: dimension must be >= 2");
    Anisotropy a;
    a.kind_ = AnisotropyKind::Euclidean;
    a.dim_ = dimension;
    return a;
}

Anisotropy Anisotropy::ellipsoidal(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() < 2)
        throw std::invalid_argument("anisotropy: A must be square, N >= 2");
    if (!A.isApprox(A.transpose(), 1e-12))
        throw std::invalid_argument("anisotropy: A must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("anisotropy: A must be positive definite");
    Anisotropy a;
    a.kind_ = AnisotropyKind::Ellipsoidal;
    a.dim_ = static_cast<int>(A.rows());
    a.A_ = A;
    return a;
}

Anisotropy Anisotropy::smoothed_lq(int dimension, double q, double eps) {
    if (dimension < 2) throw std::invalid_argument("anisotropy: dimension must be >= 2");
    if (q <= 1.0) throw std::invalid_argument("anisotropy: smoothed-lq requires q > 1");
    if (eps < 0.0) throw std::invalid_argument("anisotropy: smoothing eps must be >= 0");
    Anisotropy a;
    a.kind_ = AnisotropyKind::SmoothedLq;
    a.dim_ = dimension;
    a.q_ = q;
    a.eps_ = eps;
    return a;
}

double Anisotropy::value(const Eigen::VectorXd& xi) const {
    if (xi.norm() < floor_)
        throw DegenerateGradient("anisotropy: |xi| below degeneracy floor");
    switch (kind_) {
        case AnisotropyKind::Euclidean:
            return xi.norm();
        case AnisotropyKind::Ellipsoidal:
            return std::sqrt(xi.dot(A_ * xi));
        case AnisotropyKind::SmoothedLq: {
            double acc = 0.0;
            for (int i = 0; i < dim_; ++i)
                acc += std::pow(xi[i] * xi[i] + eps_ * eps_, q_ / 2.0);
            acc -= dim_ * std::pow(eps_, q_);
            return std::pow(std::max(acc, 0.0), 1.0 / q_);
        }
    }
    return 0.0;
}

Anisotropy::Eval Anisotropy::evaluate(const Eigen::VectorXd& xi) const {
    if (xi.size() != dim_) throw std::invalid_argument("anisotropy: wrong dimension");
    const double nrm = xi.norm();
    if (nrm < floor_)
        throw DegenerateGradient("anisotropy: |xi| below degeneracy floor");

    Eval out;
    switch (kind_) {
        case AnisotropyKind::Euclidean: {
            out.H = nrm;
            out.grad = xi / nrm;
            out.hess = (Eigen::MatrixXd::Identity(dim_, dim_) - out.grad * out.grad.transpose()) / nrm;
            break;
        }
        case AnisotropyKind::Ellipsoidal: {
            Eigen::VectorXd Axi = A_ * xi;
            out.H = std::sqrt(xi.dot(Axi));
            out.grad = Axi / out.H;
            // (A H^2 - (A xi)(A xi)^T) / H^3, closed form.
            out.hess = (A_ * (out.H * out.H) - Axi * Axi.transpose()) / (out.H * out.H * out.H);
            break;
        }
        case AnisotropyKind::SmoothedLq: {
            // T = sum_i m_i^{q/2} - N eps^q with m_i = xi_i^2 + eps^2, H = T^{1/q}.
            const double q = q_;
            Eigen::VectorXd m(dim_), mh(dim_);
            double T = -dim_ * std::pow(eps_, q);
            for (int i = 0; i < dim_; ++i) {
                m[i] = xi[i] * xi[i] + eps_ * eps_;
                mh[i] = std::pow(m[i], q / 2.0 - 1.0);
                T += std::pow(m[i], q / 2.0);
            }
            out.H = std::pow(T, 1.0 / q);
            Eigen::VectorXd w(dim_);  // w_i = m_i^{q/2-1} xi_i = dT/dxi_i / q
            for (int i = 0; i < dim_; ++i) w[i] = mh[i] * xi[i];
            const double t1 = std::pow(T, 1.0 / q - 1.0);
            const double t2 = std::pow(T, 1.0 / q - 2.0);
            out.grad = t1 * w;
            out.hess = (1.0 - q) * t2 * (w * w.transpose());
            for (int i = 0; i < dim_; ++i) {
                double diag = mh[i] + (q - 2.0) * std::pow(m[i], q / 2.0 - 2.0) * xi[i] * xi[i];
                out.hess(i, i) += t1 * diag;
            }
            break;
        }
    }
    return out;
}

Anisotropy::Eval2 Anisotropy::evaluate2(double x, double y) const {
    const double nrm = std::sqrt(x * x + y * y);
    if (nrm < floor_)
        throw DegenerateGradient("anisotropy: |xi| below degeneracy floor");

    Eval2 e{};
    switch (kind_) {
        case AnisotropyKind::Euclidean: {
            e.H = nrm;
            e.gx = x / nrm;
            e.gy = y / nrm;
            e.hxx = (1.0 - e.gx * e.gx) / nrm;
            e.hyy = (1.0 - e.gy * e.gy) / nrm;
            e.hxy = -e.gx * e.gy / nrm;
            break;
        }
        case AnisotropyKind::Ellipsoidal: {
            const double a11 = A_(0, 0), a12 = A_(0, 1), a22 = A_(1, 1);
            const double ax = a11 * x + a12 * y;
            const double ay = a12 * x + a22 * y;
            e.H = std::sqrt(x * ax + y * ay);
            e.gx = ax / e.H;
            e.gy = ay / e.H;
            const double H3 = e.H * e.H * e.H;
            e.hxx = (a11 * e.H * e.H - ax * ax) / H3;
            e.hyy = (a22 * e.H * e.H - ay * ay) / H3;
            e.hxy = (a12 * e.H * e.H - ax * ay) / H3;
            break;
        }
        case AnisotropyKind::SmoothedLq: {
            Eigen::VectorXd xi(2);
            xi << x, y;
            Eval full = evaluate(xi);
            e.H = full.H;
            e.gx = full.grad[0];
            e.gy = full.grad[1];
            e.hxx = full.hess(0, 0);
            e.hxy = full.hess(0, 1);
            e.hyy = full.hess(1, 1);
            break;
        }
    }
    return e;
}

double Anisotropy::check_homogeneity(int n_samples, std::uint64_t seed) const {
    if (n_samples < 1) throw std::invalid_argument("check_homogeneity: n_samples >= 1");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> us(-2.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd xi(dim_);
        for (int i = 0; i < dim_; ++i) xi[i] = nd(gen);
        if (xi.norm() < 1e-8) continue;
        double s = us(gen);
        if (std::abs(s) < 1e-3) s = s < 0 ? s - 1e-3 : s + 1e-3;
        const double h = value(xi);
        const double hs = value(s * xi);
        worst = std::max(worst, std::abs(hs - std::abs(s) * h) / h);
    }
    return worst;
}

double Anisotropy::estimate_ellipticity(int n_boundary_samples) const {
    if (n_boundary_samples < 1)
        throw std::invalid_argument("estimate_ellipticity: need samples");
    double lam = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_boundary_samples; ++k) {
        Eigen::VectorXd w = sweep_direction(k, n_boundary_samples, dim_);
        // Scale onto {H = 1}. For homogeneous kinds t = 1/H(w) is exact;
        // the smoothed family needs a few Newton steps on t -> H(t w).
        double t = 1.0 / value(w);
        if (kind_ == AnisotropyKind::SmoothedLq && eps_ > 0.0) {
            for (int it = 0; it < 50; ++it) {
                Eval e = evaluate(t * w);
                double slope = e.grad.dot(w);
                if (std::abs(slope) < 1e-300) break;
                double step = (e.H - 1.0) / slope;
                t -= step;
                if (std::abs(step) < 1e-15 * std::abs(t)) break;
            }
        }
        Eval e = evaluate(t * w);
        // Orthonormal basis of grad H(xi)^perp.
        Eigen::VectorXd g = e.grad.normalized();
        Eigen::MatrixXd basis(dim_, dim_ - 1);
        {
            // Householder complement of g.
            Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(dim_, dim_);
            Eigen::VectorXd v = g;
            v[0] += (g[0] >= 0 ? 1.0 : -1.0);
            v.normalize();
            Q -= 2.0 * v * v.transpose();
            basis = Q.rightCols(dim_ - 1);
        }
        for (int c = 0; c < basis.cols(); ++c) {
            Eigen::VectorXd v = basis.col(c);
            lam = std::min(lam, v.dot(e.hess * v) / v.squaredNorm());
        }
    }
    if (!(lam > 1e-12))
        throw NotUniformlyElliptic("estimate_ellipticity: estimate <= tolerance floor");
    return lam;
}

std::pair<double, double> Anisotropy::estimate_norm_equivalence(int n_samples) const {
    if (n_samples < 1) throw std::invalid_argument("estimate_norm_equivalence: need samples");
    double c1 = std::numeric_limits<double>::infinity();
    double c2 = 0.0;
    if (dim_ == 2) {
        auto h_at = [&](double ang) {
            Eigen::VectorXd w(2);
            w << std::cos(ang), std::sin(ang);
            return value(w);
        };
        double ang_min = 0.0, ang_max = 0.0;
        for (int k = 0; k < n_samples; ++k) {
            double ang = 2.0 * M_PI * k / n_samples;
            double h = h_at(ang);
            if (h < c1) { c1 = h; ang_min = ang; }
            if (h > c2) { c2 = h; ang_max = ang; }
        }
        // Golden-section polish around the best sweep samples.
        auto polish = [&](double center, bool minimize) {
            double a = center - 2.0 * M_PI / n_samples;
            double b = center + 2.0 * M_PI / n_samples;
            const double gr = 0.6180339887498949;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            for (int it = 0; it < 80; ++it) {
                double fc = h_at(c), fd = h_at(d);
                bool keep_left = minimize ? (fc < fd) : (fc > fd);
                if (keep_left) { b = d; } else { a = c; }
                c = b - gr * (b - a);
                d = a + gr * (b - a);
            }
            return h_at(0.5 * (a + b));
        };
        c1 = std::min(c1, polish(ang_min, true));
        c2 = std::max(c2, polish(ang_max, false));
    } else {
        for (int k = 0; k < n_samples; ++k) {
            double h = value(sweep_direction(k, n_samples, dim_));
            c1 = std::min(c1, h);
            c2 = std::max(c2, h);
        }
    }
    return {c1, c2};
}

AnisotropyReport Anisotropy::verify(int n_samples, std::uint64_t seed) const {
    AnisotropyReport r;
    r.sample_count = n_samples;
    r.max_homogeneity_error = check_homogeneity(n_samples, seed);
    auto [c1, c2] = estimate_norm_equivalence(n_samples);
    r.c1_hat = c1;
    r.c2_hat = c2;
    r.lambda_hat = estimate_ellipticity(std::min(n_samples, 4096));

    std::mt19937_64 gen(seed ^ 0xa5a5a5a5ULL);
    std::normal_distribution<double> nd;
    double euler = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        Eigen::VectorXd xi(dim_);
        for (int i = 0; i < dim_; ++i) xi[i] = nd(gen);
        if (xi.norm() < 1e-8) continue;
        Eval e = evaluate(xi);
        euler = std::max(euler, std::abs(e.grad.dot(xi) - e.H) / e.H);
    }
    r.max_euler_error = euler;
    return r;
}

}  // namespace finsler
