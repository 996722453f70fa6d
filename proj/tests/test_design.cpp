#include "effham/design.hpp"
#include "effham/effective_model.hpp"
#include "effham/random.hpp"
#include "effham/swpt.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace effham;

namespace {

// Cheap deterministic map for exercising the design code: SWPT plus a small ZZ.
class SwptPlusZz final : public CoefficientMap {
public:
    CoefficientVector coefficients(const DeviceParams& eta, const ControlFlux& phi) const override {
        CoefficientVector c = swpt_coefficients(q_, eta, phi, frame_);
        c[Term::ZZ] = 50.0 * eta.ec_q1q2 + phi.phi_c1;
        return c;
    }
    CoefficientVector coefficients_with_jacobian(const DeviceParams& eta, const ControlFlux& phi,
                                                 Mat5& jacobian) const override {
        jacobian.setZero();
        return coefficients(eta, phi);
    }

private:
    QubitConstants q_;
    FrameConfig frame_ = FrameConfig::standard();
};

double min_pairwise(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            best = std::min(best, (x.col(static_cast<Eigen::Index>(idx[a])) - x.col(static_cast<Eigen::Index>(idx[b]))).norm());
    return best;
}

}  // namespace

TEST_SUITE("design") {

TEST_CASE("candidate set") {
    const auto c = build_candidates();
    CHECK(c.size() == 540);
    CHECK(c.front().label() == "(Z+,Z+)|IX");
    CHECK(c.back().label() == "(Y-,Y-)|ZZ");
    std::set<std::string> labels;
    for (const auto& p : c) labels.insert(p.label());
    CHECK(labels.size() == 540);
}

TEST_CASE("signal matrix") {
    const SwptPlusZz map;
    const EnsembleSpec box;
    const SignalMatrix s = informativeness_signals(map, box, 60, 1.0, 3);
    CHECK(s.values.rows() == 60);
    CHECK(s.values.cols() == 540);
    CHECK(s.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    const SignalMatrix again = informativeness_signals(map, box, 60, 1.0, 3, 3);
    CHECK(again.values == s.values);
    // |Z+ Z+> is an eigenstate of an excitation-preserving Hamiltonian, so <XI> stays 0.
    const auto& cols = s.columns;
    const auto it = std::find(cols.begin(), cols.end(), MeasurementPair::parse("(Z+,Z+)|XI"));
    REQUIRE(it != cols.end());
    CHECK(s.variances()(it - cols.begin()) < 1e-20);
    // Row i is the expectation vector at draw i.
    const Eigen::VectorXd row = effective_expectations(map.coefficients(s.draw_eta[5], s.draw_phi[5]), cols, 1.0);
    CHECK((row.transpose() - s.values.row(5)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("greedy selection against brute-force least squares") {
    Rng rng(21);
    Eigen::MatrixXd v(500, 540);
    // Correlated columns: a low-rank part plus noise of varying size.
    Eigen::MatrixXd basis(500, 12);
    for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = rng.normal();
    Eigen::MatrixXd mix(12, 540);
    for (Eigen::Index i = 0; i < mix.size(); ++i) mix.data()[i] = rng.normal();
    v = basis * mix;
    for (Eigen::Index j = 0; j < v.cols(); ++j)
        for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) += 0.01 * (1 + j % 7) * rng.normal();
    const SelectionResult g = greedy_select(v, 7);
    const auto ref = oracle::brute_force_greedy(v, 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(static_cast<Eigen::Index>(g.indices[i]) == ref[i]);
    for (std::size_t i = 0; i < g.marginal.size(); ++i) {
        CHECK(g.marginal[i] <= g.raw[i] * (1 + 1e-12));
        if (i > 0) CHECK(g.marginal[i] <= g.marginal[i - 1] * (1 + 1e-12));
    }
    CHECK(g.marginal[0] == doctest::Approx(g.raw[0]));

    // k = 1 is the largest-variance column.
    const SelectionResult one = greedy_select(v, 1);
    const Eigen::MatrixXd c = v.rowwise() - v.colwise().mean();
    Eigen::Index arg = 0;
    c.colwise().squaredNorm().maxCoeff(&arg);
    CHECK(static_cast<Eigen::Index>(one.indices[0]) == arg);
}

TEST_CASE("duplicated and negated columns are never both picked") {
    Rng rng(4);
    Eigen::MatrixXd v(100, 20);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal();
    v.col(7) = v.col(3);
    v.col(12) = -2.0 * v.col(5);
    const SelectionResult g = greedy_select(v, 18);
    const std::set<std::size_t> s(g.indices.begin(), g.indices.end());
    CHECK(!(s.count(3) && s.count(7)));
    CHECK(!(s.count(5) && s.count(12)));
    CHECK_THROWS_AS(greedy_select(v, 19), RankDeficiencyError);
    CHECK_THROWS_AS(greedy_select(Eigen::MatrixXd::Ones(10, 4), 1), RankDeficiencyError);
}

TEST_CASE("farthest-point sampling") {
    const std::vector<ControlFlux> two = {{0.0, 0.0, 0.1}, {0.5, 0.5, 1.35}};
    const FpsResult t = fps_select(two, 2);
    CHECK(t.indices.size() == 2);
    CHECK(t.indices[0] != t.indices[1]);

    std::vector<ControlFlux> grid;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k) grid.push_back({0.125 * i, 0.125 * j, 0.1 + 0.3125 * k});
    const FpsResult g = fps_select(grid, 3);
    CHECK(g.fluxes[0] == ControlFlux{0.25, 0.25, 0.725});
    CHECK(g.fluxes[1] == grid.front());
    // Every other corner is equally far from both earlier picks.
    const auto a = g.fluxes[2].to_array();
    CHECK((a[0] == 0.0 || a[0] == 0.5));
    CHECK((a[1] == 0.0 || a[1] == 0.5));
    CHECK((a[2] == 0.1 || a[2] == 0.1 + 0.3125 * 4));
    CHECK(g.fluxes[2] != grid.front());
    CHECK(g.min_distance[2] == doctest::Approx(g.min_distance[1]).epsilon(1e-12));
    CHECK(g.min_distance[0] == 0.0);
    CHECK(g.min_distance[1] > 0.0);

    // Spread against random subsets of the same size.
    const EnsembleSpec box;
    const auto pool = sample_pulses(box, 1000, 9);
    const FpsResult f = fps_select(pool, 20);
    Eigen::MatrixXd x(3, 1000);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto a = pool[i].to_array();
        x.col(static_cast<Eigen::Index>(i)) << a[0], a[1], a[2];
    }
    x.colwise() -= x.rowwise().mean();
    for (int d = 0; d < 3; ++d) x.row(d) /= std::sqrt(x.row(d).squaredNorm() / 1000.0);
    const double fps_spread = min_pairwise(x, f.indices);
    for (std::size_t i = 2; i < f.min_distance.size(); ++i) CHECK(f.min_distance[i] <= f.min_distance[i - 1]);
    CHECK(fps_spread == doctest::Approx(f.min_distance.back()).epsilon(1e-12));
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> idx(1000);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng.engine());
        idx.resize(20);
        CHECK(fps_spread > min_pairwise(x, idx));
    }
    CHECK_THROWS(fps_select(pool, 1001));
}

}  // TEST_SUITE
