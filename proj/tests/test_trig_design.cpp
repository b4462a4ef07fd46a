#include <doctest.h>

#include "climnorm/error.hpp"
#include "climnorm/kernels.hpp"
#include "climnorm/trig_design.hpp"
#include "oracles.hpp"

using namespace climnorm;

TEST_CASE("design labels and widths") {
    CHECK(design_width(12) == 12);
    CHECK(design_width(7) == 7);
    const auto l = design_labels(4);
    REQUIRE(l.size() == 4);
    CHECK(l[0] == "level");
    CHECK(l[1] == "cos1");
    CHECK(l[2] == "sin1");
    CHECK(l[3] == "nyquist");
}

TEST_CASE("design rows match direct trigonometric evaluation") {
    for (int s : {4, 7, 12}) {
        const auto lags = oracle::lag_range(-40, 40);
        const Matrix x = design_matrix(s, lags);
        const auto ref = oracle::trig_design(s, lags);
        CHECK((Eigen::MatrixXd(x) - ref).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("build_design stacks the lag blocks") {
    const int s = 4, m = 3;
    const auto d = build_design(s, m);
    CHECK(d.xp.rows() == s * m);
    CHECK(d.xf.rows() == s * m);
    CHECK(d.xc.rows() == s * m + 1);
    CHECK(d.x.rows() == 2 * s * m + 1);
    CHECK((d.x.row(s * m).transpose() - d.x0).norm() == 0.0);
    CHECK((d.xc.row(0).transpose() - d.x0).norm() == 0.0);
    CHECK((Eigen::MatrixXd(d.xp) - oracle::trig_design(s, oracle::lag_range(1, s * m))).norm() < 1e-12);
    CHECK((Eigen::MatrixXd(d.x) - oracle::trig_design(s, oracle::lag_range(-s * m, s * m))).norm() < 1e-12);
    // X_f = E X_p S: future rows mirror the past ones with the sine columns flipped.
    const Matrix mirrored = exchange_matrix(static_cast<std::size_t>(s * m)) * d.xp * sine_sign_switch(s);
    CHECK((mirrored - d.xf).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK_THROWS_AS(build_design(1, 2), Error);
    CHECK_THROWS_AS(build_design(4, 0), Error);
}

TEST_CASE("projection weights match the pseudo-inverse oracle") {
    const int s = 12, m = 3;
    const auto d = build_design(s, m);
    const auto lags = oracle::lag_range(0, s * m);
    const auto xc = oracle::trig_design(s, lags);
    const oracle::Vec x0 = xc.row(0).transpose();

    const auto w = projection_weights(d.xc, {}, d.x0);
    CHECK((w - oracle::ls_weights(xc, x0)).lpNorm<Eigen::Infinity>() < 1e-12);

    // A seasonal kernel leaves X'KX singular; the minimum-norm route still
    // gives the estimable projection.
    const auto k = seasonal_kernel(1, m, s, Window::Causal);
    const auto wk = projection_weights(d.xc, k.weights, d.x0);
    CHECK((wk - oracle::projection(xc, k.weights, x0)).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(wk.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-estimable targets raise rank_deficient naming the column") {
    const auto d = build_design(4, 2);
    std::vector<double> kernel(static_cast<std::size_t>(d.xc.rows()), 0.0);
    kernel[0] = 1.0;  // a single observation cannot identify the harmonics
    Vector target = Vector::Zero(4);
    target(1) = 1.0;
    const auto labels = design_labels(4);
    try {
        (void)projection_weights(d.xc, kernel, target, labels);
        FAIL("expected rank deficiency");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
        CHECK(std::string(e.what()).find("cos1") != std::string::npos);
    }
}

TEST_CASE("uniform trend residual is j minus its residue-class mean") {
    for (int s : {4, 12}) {
        for (int m : {1, 2, 7}) {
            const auto d = build_design(s, m);
            const auto t = orthogonalize_trend(d);
            const int sm = s * m;
            for (int j = 0; j <= sm; ++j) {
                double sum = 0.0;
                int count = 0;
                for (int i = j % s; i <= sm; i += s) {
                    sum += -i;
                    ++count;
                }
                CHECK(t.jc_star(j) == doctest::Approx(-j - sum / count).epsilon(1e-12));
            }
            CHECK(t.j0c_star > 0.0);
            CHECK(t.j0c_star == doctest::Approx(t.jc_star(0)));
        }
    }
}

TEST_CASE("kernel trend residual matches the oracle") {
    const int s = 4, m = 5;
    const auto d = build_design(s, m);
    const auto k = seasonal_kernel(2, m, s, Window::Causal);
    const auto t = orthogonalize_trend(d, k.weights);
    oracle::Vec j(s * m + 1);
    for (int i = 0; i <= s * m; ++i) j(i) = -i;
    const auto ref = oracle::weighted_residual(oracle::trig_design(s, oracle::lag_range(0, s * m)), k.weights, j);
    // Off the kernel support the residual is not identified; compare on it.
    for (std::size_t i = 0; i < k.weights.size(); ++i) {
        if (k.weights[i] > 0.0) {
            CHECK(t.jc_star(static_cast<Eigen::Index>(i)) == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-10));
        }
    }
}

TEST_CASE("two-sided trend residual is odd around the centre") {
    const auto d = build_design(4, 3);
    const auto r = orthogonalize_trend_two_sided(d);
    const auto n = r.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(r(i) == doctest::Approx(-r(n - 1 - i)).epsilon(1e-12));
    }
    CHECK(std::abs(r(n / 2)) < 1e-12);
}
