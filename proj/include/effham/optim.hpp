// optim.hpp: limited-memory BFGS with optional box constraints.
//
// Without bounds this is plain L-BFGS with a backtracking Armijo line search.
// With bounds, variables pinned at a bound with the gradient pointing outward
// are frozen for the step, the two-loop recursion runs on the free subspace,
// and the line search follows the projected path P(x + a d).

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace effham::optim {

// Returns f(x) and writes grad f(x) into the second argument.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsOptions {
    int max_iterations = 100;
    int memory = 10;
    // Max-norm of the projected gradient.
    double gradient_tolerance = 1e-10;
    // Stop when f_prev - f <= relative_tolerance * max(|f_prev|, |f|).
    double relative_tolerance = 0.0;
    // Stop when f drops below this value.
    double absolute_tolerance = -std::numeric_limits<double>::infinity();
    double armijo = 1e-4;
    int max_line_search = 40;
};

enum class LbfgsStatus {
    GradientConverged,
    FunctionConverged,
    AbsoluteConverged,
    // Further progress is below the floating-point resolution of f.
    RoundoffLimited,
    MaxIterations,
    LineSearchFailed,
};

std::string to_string(LbfgsStatus s);

struct LbfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    int evaluations = 0;
    LbfgsStatus status = LbfgsStatus::MaxIterations;
    // Objective at the start and after every accepted step; non-increasing.
    std::vector<double> trace;

    bool converged() const {
        return status == LbfgsStatus::GradientConverged || status == LbfgsStatus::FunctionConverged ||
               status == LbfgsStatus::AbsoluteConverged || status == LbfgsStatus::RoundoffLimited;
    }
};

LbfgsResult minimize(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options);

LbfgsResult minimize_bounded(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LbfgsOptions& options);

}  // namespace effham::optim
