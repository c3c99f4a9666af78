#include "finslerlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace finsler {

Profile Profile::power(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("profile: requires p > 1");
    return Profile(ProfileKind::Power, p, 0.0);
}

Profile Profile::regularized(double p, double kappa) {
    if (!(p > 1.0)) throw std::invalid_argument("profile: requires p > 1");
    if (kappa < 0.0 || kappa > 1.0)
        throw std::invalid_argument("profile: kappa must lie in [0,1]");
    return Profile(ProfileKind::Regularized, p, kappa);
}

Profile::Eval Profile::evaluate(double t) const {
    if (t < 0.0) throw NegativeArgument("profile: t must be >= 0");
    Eval e{};
    if (kind_ == ProfileKind::Power || kappa_ == 0.0) {
        e.B = std::pow(t, p_) / p_;
        e.dB = std::pow(t, p_ - 1.0);
        e.d2B = t == 0.0 ? (p_ == 2.0 ? 1.0 : (p_ > 2.0 ? 0.0 : std::numeric_limits<double>::infinity()))
                         : (p_ - 1.0) * std::pow(t, p_ - 2.0);
        return e;
    }
    const double m = kappa_ * kappa_ + t * t;
    e.B = (std::pow(m, p_ / 2.0) - std::pow(kappa_, p_)) / p_;
    e.dB = std::pow(m, (p_ - 2.0) / 2.0) * t;
    e.d2B = std::pow(m, (p_ - 2.0) / 2.0) + (p_ - 2.0) * std::pow(m, (p_ - 4.0) / 2.0) * t * t;
    return e;
}

double Profile::B(double t) const { return evaluate(t).B; }
double Profile::dB(double t) const { return evaluate(t).dB; }
double Profile::d2B(double t) const { return evaluate(t).d2B; }

std::vector<double> Profile::log_grid(double t_min, double t_max, int n) {
    std::vector<double> g(n);
    const double l0 = std::log(t_min), l1 = std::log(t_max);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(l0 + (l1 - l0) * i / (n - 1.0));
    return g;
}

BoundsReport Profile::check_structural_bounds(std::span<const double> t_grid) const {
    BoundsReport r;
    r.gamma_hat = r.gamma_hat_second = std::numeric_limits<double>::infinity();
    r.Gamma_hat = r.Gamma_hat_second = 0.0;
    r.t_min = std::numeric_limits<double>::infinity();
    r.t_max = 0.0;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("check_structural_bounds: grid must lie in (0,inf)");
        r.t_min = std::min(r.t_min, t);
        r.t_max = std::max(r.t_max, t);
        const Eval e = evaluate(t);
        const double env = std::pow(kappa_ + t, p_ - 2.0);
        const double r1 = e.dB / (env * t);
        const double r2 = e.d2B / env;
        r.gamma_hat = std::min(r.gamma_hat, r1);
        r.Gamma_hat = std::max(r.Gamma_hat, r1);
        r.gamma_hat_second = std::min(r.gamma_hat_second, r2);
        r.Gamma_hat_second = std::max(r.Gamma_hat_second, r2);
    }
    r.pass = std::isfinite(r.Gamma_hat) && std::isfinite(r.Gamma_hat_second) &&
             r.gamma_hat > 0.0 && r.gamma_hat_second > 0.0;
    return r;
}

BoundsReport Profile::check_structural_bounds() const {
    auto g = log_grid(1e-6, 1e6, 10000);
    return check_structural_bounds(g);
}

double Profile::bprime_times_t_vs_B(std::span<const double> t_grid) const {
    double c = 0.0;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("bprime_times_t_vs_B: grid must lie in (0,inf)");
        const Eval e = evaluate(t);
        if (e.B > 0.0) c = std::max(c, e.dB * t / e.B);
    }
    return c;
}

double Profile::bprime_times_t_vs_B() const {
    auto g = log_grid(1e-6, 1e6, 10000);
    return bprime_times_t_vs_B(g);
}

}  // namespace finsler
