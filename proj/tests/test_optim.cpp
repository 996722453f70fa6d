#include "effham/optim.hpp"

#include <doctest.h>

#include <cmath>

using namespace effham::optim;
using Eigen::VectorXd;

namespace {

double rosenbrock(const VectorXd& x, VectorXd& g) {
    g.resize(x.size());
    g.setZero();
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i), b = 1.0 - x(i);
        f += 100.0 * a * a + b * b;
        g(i) += -400.0 * x(i) * a - 2.0 * b;
        g(i + 1) += 200.0 * a;
    }
    return f;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("unconstrained Rosenbrock") {
    VectorXd x0(4);
    x0 << -1.2, 1.0, -0.5, 0.8;
    LbfgsOptions o;
    o.max_iterations = 500;
    const LbfgsResult r = minimize(rosenbrock, x0, o);
    CHECK(r.converged());
    CHECK((r.x - VectorXd::Ones(4)).cwiseAbs().maxCoeff() < 1e-6);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
    VectorXd g0;
    CHECK(r.trace.front() == doctest::Approx(rosenbrock(x0, g0)));
}

TEST_CASE("box constraints are respected and active bounds found") {
    // Minimum of (x - 2)^2 + (y + 1)^2 on [0, 1]^2 is at (1, 0).
    auto f = [](const VectorXd& x, VectorXd& g) {
        g = VectorXd(2);
        g << 2 * (x(0) - 2), 2 * (x(1) + 1);
        return (x(0) - 2) * (x(0) - 2) + (x(1) + 1) * (x(1) + 1);
    };
    const VectorXd lo = VectorXd::Zero(2), hi = VectorXd::Ones(2);
    VectorXd x0(2);
    x0 << 0.3, 0.6;
    const LbfgsResult r = minimize_bounded(f, x0, lo, hi, {});
    CHECK(r.x(0) == doctest::Approx(1.0));
    CHECK(r.x(1) == doctest::Approx(0.0));
    CHECK(r.converged());

    // Starting outside the box is projected first.
    x0 << 5.0, -3.0;
    const LbfgsResult r2 = minimize_bounded(rosenbrock, x0, lo, hi, {});
    CHECK((r2.x.array() >= 0.0).all());
    CHECK((r2.x.array() <= 1.0).all());
    CHECK(r2.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("interior minimum with bounds matches the unconstrained one") {
    auto f = [](const VectorXd& x, VectorXd& g) {
        g = 2.0 * (x.array() - 0.4).matrix();
        return (x.array() - 0.4).square().sum();
    };
    const LbfgsResult r = minimize_bounded(f, VectorXd::Constant(3, 0.9), VectorXd::Zero(3), VectorXd::Ones(3), {});
    CHECK((r.x.array() - 0.4).abs().maxCoeff() < 1e-8);
}

TEST_CASE("iteration cap and stopping rules") {
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    LbfgsOptions o;
    o.max_iterations = 3;
    const LbfgsResult r = minimize(rosenbrock, x0, o);
    CHECK(r.status == LbfgsStatus::MaxIterations);
    CHECK(r.iterations == 3);
    CHECK(!r.converged());

    o.max_iterations = 1000;
    o.absolute_tolerance = 1e-3;
    const LbfgsResult a = minimize(rosenbrock, x0, o);
    CHECK(a.status == LbfgsStatus::AbsoluteConverged);
    CHECK(a.f < 1e-3);
}

TEST_CASE("starting at the minimum converges immediately") {
    const LbfgsResult r = minimize(rosenbrock, VectorXd::Ones(3), {});
    CHECK(r.converged());
    CHECK(r.iterations == 0);
    CHECK(r.f == 0.0);
}

}  // TEST_SUITE
