#include "effham/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace effham::optim {

std::string to_string(LbfgsStatus s) {
    switch (s) {
        case LbfgsStatus::GradientConverged: return "gradient_converged";
        case LbfgsStatus::FunctionConverged: return "function_converged";
        case LbfgsStatus::AbsoluteConverged: return "absolute_converged";
        case LbfgsStatus::MaxIterations: return "max_iterations";
        case LbfgsStatus::LineSearchFailed: return "line_search_failed";
        case LbfgsStatus::RoundoffLimited: return "roundoff_limited";
    }
    return "unknown";
}

namespace {

struct Correction {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

// Two-loop recursion restricted to the coordinates where mask == 1.
Eigen::VectorXd two_loop(const std::deque<Correction>& memory, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& mask) {
    Eigen::VectorXd q = g.cwiseProduct(mask);
    const std::size_t m = memory.size();
    std::vector<double> alpha(m, 0.0), rho(m, 0.0);
    double gamma = 1.0;
    bool have_gamma = false;
    for (std::size_t idx = m; idx-- > 0;) {
        const Eigen::VectorXd s = memory[idx].s.cwiseProduct(mask);
        const Eigen::VectorXd y = memory[idx].y.cwiseProduct(mask);
        const double sy = s.dot(y);
        if (!(sy > 1e-300)) continue;
        rho[idx] = 1.0 / sy;
        alpha[idx] = rho[idx] * s.dot(q);
        q -= alpha[idx] * y;
        if (!have_gamma) {
            gamma = sy / y.squaredNorm();
            have_gamma = true;
        }
    }
    Eigen::VectorXd r = gamma * q;
    for (std::size_t idx = 0; idx < m; ++idx) {
        if (rho[idx] == 0.0) continue;
        const Eigen::VectorXd s = memory[idx].s.cwiseProduct(mask);
        const Eigen::VectorXd y = memory[idx].y.cwiseProduct(mask);
        const double beta = rho[idx] * y.dot(r);
        r += (alpha[idx] - beta) * s;
    }
    return r.cwiseProduct(mask);
}

}  // namespace

LbfgsResult minimize_bounded(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LbfgsOptions& options) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("minimize_bounded: bound size mismatch");
    if ((lower.array() > upper.array()).any()) throw std::invalid_argument("minimize_bounded: lower > upper");

    LbfgsResult res;
    res.x = project(x0, lower, upper);
    res.gradient.resize(n);
    res.f = f(res.x, res.gradient);
    res.evaluations = 1;
    res.trace.push_back(res.f);
    if (!std::isfinite(res.f)) {
        res.status = LbfgsStatus::LineSearchFailed;
        return res;
    }

    std::deque<Correction> memory;
    Eigen::VectorXd g_new(n);

    auto projected_gradient_norm = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
        return (project(x - g, lower, upper) - x).cwiseAbs().maxCoeff();
    };

    res.status = LbfgsStatus::MaxIterations;
    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        const double pg = n == 0 ? 0.0 : projected_gradient_norm(res.x, res.gradient);
        if (pg <= options.gradient_tolerance) {
            res.status = LbfgsStatus::GradientConverged;
            break;
        }
        if (res.f <= options.absolute_tolerance) {
            res.status = LbfgsStatus::AbsoluteConverged;
            break;
        }

        Eigen::VectorXd mask = Eigen::VectorXd::Ones(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool at_lower = res.x(i) <= lower(i) && res.gradient(i) > 0.0;
            const bool at_upper = res.x(i) >= upper(i) && res.gradient(i) < 0.0;
            if (at_lower || at_upper) mask(i) = 0.0;
        }

        Eigen::VectorXd d = -two_loop(memory, res.gradient, mask);
        double slope = res.gradient.dot(d);
        if (!(slope < 0.0)) {
            memory.clear();
            d = -res.gradient.cwiseProduct(mask);
            slope = res.gradient.dot(d);
        }
        double step = 1.0;
        if (memory.empty()) step = std::min(1.0, 1.0 / std::max(d.cwiseAbs().maxCoeff(), 1e-300));

        bool accepted = false;
        Eigen::VectorXd x_new(n);
        double f_new = 0.0;
        const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(res.f);
        if (-slope * step <= noise) {
            // Predicted decrease is below the round-off of f: take the full
            // step only if f does not increase and the projected gradient drops.
            x_new = project(res.x + step * d, lower, upper);
            f_new = f(x_new, g_new);
            ++res.evaluations;
            accepted = std::isfinite(f_new) && f_new <= res.f && projected_gradient_norm(x_new, g_new) < pg;
            if (!accepted) {
                res.status = LbfgsStatus::RoundoffLimited;
                break;
            }
        } else {
            // Backtracking on the projected path with quadratic interpolation.
            for (int ls = 0; ls < options.max_line_search; ++ls) {
                x_new = project(res.x + step * d, lower, upper);
                f_new = f(x_new, g_new);
                ++res.evaluations;
                const double decrease = res.gradient.dot(x_new - res.x);
                if (std::isfinite(f_new) && f_new <= res.f + options.armijo * decrease && f_new <= res.f) {
                    accepted = true;
                    break;
                }
                double next = 0.5 * step;
                if (std::isfinite(f_new)) {
                    const double denom = 2.0 * (f_new - res.f - step * slope);
                    if (denom > 0.0) next = std::clamp(-slope * step * step / denom, 0.1 * step, 0.5 * step);
                }
                step = next;
            }
            if (!accepted) {
                res.status = LbfgsStatus::LineSearchFailed;
                break;
            }
        }

        Correction c{x_new - res.x, g_new - res.gradient};
        const double sy = c.s.dot(c.y);
        if (sy > 1e-12 * c.y.squaredNorm() && sy > 0.0) {
            memory.push_back(std::move(c));
            if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
        }

        const double f_prev = res.f;
        res.x = x_new;
        res.f = f_new;
        res.gradient = g_new;
        res.trace.push_back(res.f);

        if (options.relative_tolerance > 0.0 &&
            f_prev - res.f <= options.relative_tolerance * std::max(std::abs(f_prev), std::abs(res.f))) {
            ++res.iterations;
            res.status = LbfgsStatus::FunctionConverged;
            break;
        }
    }
    if (res.status == LbfgsStatus::MaxIterations &&
        (n == 0 || projected_gradient_norm(res.x, res.gradient) <= options.gradient_tolerance))
        res.status = LbfgsStatus::GradientConverged;
    return res;
}

LbfgsResult minimize(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options) {
    const Eigen::Index n = x0.size();
    const double inf = std::numeric_limits<double>::infinity();
    return minimize_bounded(f, std::move(x0), Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf),
                            options);
}

}  // namespace effham::optim
