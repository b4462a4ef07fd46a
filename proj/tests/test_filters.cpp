#include <doctest.h>

#include "climnorm/error.hpp"
#include "climnorm/filters.hpp"
#include "climnorm/rng.hpp"
#include "climnorm/trig_design.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace climnorm;

namespace {

TrigParams random_params(int s, Rng& rng, bool trend) {
    TrigParams p = TrigParams::zero(s);
    p.beta0 = 10.0 * rng.normal();
    p.beta1 = trend ? 0.05 * rng.normal() : 0.0;
    for (auto& g : p.gammas) g = rng.normal();
    for (auto& g : p.gamma_stars) g = rng.normal();
    return p;
}

SeasonalSeries normal_series(const TrigParams& p, int s, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = eval_normal(p, static_cast<long long>(t), s);
    return SeasonalSeries(std::move(v), s);
}

double max_abs_anomaly(const NormalsResult& r) {
    double e = 0.0;
    for (std::size_t t = 0; t < r.anomalies.size(); ++t) {
        if (!r.anomalies.missing(t)) e = std::max(e, std::abs(r.anomalies[t]));
    }
    return e;
}

oracle::Vec as_vec(const FilterWeights& w) {
    return Eigen::Map<const oracle::Vec>(w.weights.data(), static_cast<Eigen::Index>(w.weights.size()));
}

}  // namespace

TEST_CASE("filter kind names round-trip") {
    for (auto k : {FilterKind::Wmo, FilterKind::Concurrent, FilterKind::TwoSided, FilterKind::Daf,
                   FilterKind::TrendAdjustment, FilterKind::Regularized}) {
        CHECK(parse_filter_kind(to_string(k)) == k);
    }
    CHECK_FALSE(parse_filter_kind("henderson").has_value());
}

TEST_CASE("concurrent weights") {
    const auto w = concurrent_weights(29, 12);
    REQUIRE(w.weights.size() == 349);
    int nonzero = 0;
    for (long long j = 0; j <= 348; ++j) {
        if (j % 12 == 0) {
            CHECK(w.at(j) == doctest::Approx(1.0 / 30));
            ++nonzero;
        } else {
            CHECK(w.at(j) == 0.0);
        }
    }
    CHECK(nonzero == 30);
    const auto small = concurrent_weights(1, 4);
    CHECK(small.at(0) == 0.5);
    CHECK(small.at(4) == 0.5);
    CHECK(small.sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(concurrent_weights(-1, 12), Error);
}

TEST_CASE("uniform closed forms match the matrix oracles") {
    for (int s : {4, 12}) {
        for (int m : {1, 2, 5, 10}) {
            const int sm = s * m;
            const auto x = oracle::trig_design(s, oracle::lag_range(-sm, sm));
            const auto xc = oracle::trig_design(s, oracle::lag_range(0, sm));
            const oracle::Vec x0 = xc.row(0).transpose();
            const auto two = two_sided_weights(m, s);
            const auto daf = daf_weights(m, s);
            CHECK((as_vec(two) - oracle::ls_weights(x, x0)).lpNorm<Eigen::Infinity>() < 1e-10);
            CHECK((as_vec(daf) - oracle::ls_weights(xc, x0)).lpNorm<Eigen::Infinity>() < 1e-10);
            CHECK(two.first_offset == -sm);
            CHECK(daf.first_offset == 0);
        }
    }
    const auto w = two_sided_weights(2, 12);
    for (long long j : {-24, -12, 0, 12, 24}) CHECK(w.at(j) == doctest::Approx(0.2));
    const auto d = daf_weights(1, 2);
    CHECK(d.at(0) == doctest::Approx(0.5));
    CHECK(d.at(2) == doctest::Approx(0.5));
    CHECK(d.at(1) == 0.0);
}

TEST_CASE("kernel filters match the weighted projection oracle") {
    const int s = 12, m = 2;
    const auto w = two_sided_weights(m, s, KernelSpec::seasonal(1));
    const double z = 35.0;
    CHECK(w.at(0) == doctest::Approx(9 / z));
    CHECK(w.at(12) == doctest::Approx(8 / z));
    CHECK(w.at(-24) == doctest::Approx(5 / z));
    CHECK(w.at(5) == doctest::Approx(0.0).epsilon(1e-12));

    for (int d : {0, 1, 2}) {
        const auto kc = seasonal_kernel(d, 4, 4, Window::Causal);
        const auto daf = daf_weights(4, 4, kc);
        const auto xc = oracle::trig_design(4, oracle::lag_range(0, 16));
        const auto ref = oracle::projection(xc, kc.weights, xc.row(0).transpose());
        CHECK((as_vec(daf) - ref).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(daf.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("trend adjustment weights") {
    for (int s : {4, 12}) {
        for (int m : {2, 3, 10, 30}) {
            for (auto kernel : {KernelSpec::uniform(), KernelSpec::seasonal(1)}) {
                const auto wa = trend_adjustment_weights(m, s, kernel);
                CHECK(std::abs(wa.sum()) < 1e-12);
                // w_a' j_c = j*_{0c}
                const auto c = causal_components(m, s, kernel);
                double dot = 0.0;
                for (std::size_t j = 0; j < wa.weights.size(); ++j) dot += wa.weights[j] * -static_cast<double>(j);
                CHECK(dot == doctest::Approx(c.j0c_star).epsilon(1e-9));
                CHECK((as_vec(wa) - c.wa).lpNorm<Eigen::Infinity>() < 1e-12);
            }
            const auto wu = trend_adjustment_weights(m, s);
            for (std::size_t j = 1; j < wu.weights.size(); ++j) {
                CHECK(wu.weights[j] <= wu.weights[j - 1] + 1e-15);
            }
        }
    }
}

TEST_CASE("uniform trend adjustment matches the projection route") {
    const int s = 4, m = 6;
    const auto closed = trend_adjustment_weights(m, s);
    std::vector<double> flat(static_cast<std::size_t>(s * m + 1), 1.0);
    KernelWeights k{flat, Window::Causal, 0, s, m};
    const auto route = trend_adjustment_weights(m, s, k);
    CHECK((as_vec(closed) - as_vec(route)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("regularized weights interpolate") {
    const int s = 12, m = 8;
    const auto daf = daf_weights(m, s);
    const auto wa = trend_adjustment_weights(m, s);
    const auto r0 = regularized_weights(m, s, 0.0);
    const auto r1 = regularized_weights(m, s, 1.0);
    const auto rh = regularized_weights(m, s, 0.5);
    for (std::size_t j = 0; j < daf.weights.size(); ++j) {
        CHECK(r0.weights[j] == daf.weights[j]);
        CHECK(r1.weights[j] == doctest::Approx(daf.weights[j] + wa.weights[j]).epsilon(1e-14));
        CHECK(rh.weights[j] == doctest::Approx(0.5 * (r0.weights[j] + r1.weights[j])).epsilon(1e-14));
    }
    CHECK(rh.lambda == 0.5);
    CHECK(rh.kind == FilterKind::Regularized);
    CHECK_THROWS_AS(regularized_weights(m, s, 1.5), Error);
    CHECK_THROWS_AS(regularized_weights(m, s, -0.1), Error);
}

TEST_CASE("filters reproduce the normals they are built for") {
    Rng rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        for (int s : {4, 12}) {
            for (auto kernel : {KernelSpec::uniform(), KernelSpec::seasonal(1), KernelSpec::seasonal(3)}) {
                const int m = 3 + rep % 4;
                const auto flat = normal_series(random_params(s, rng, false), s, 400);
                const auto sloped = normal_series(random_params(s, rng, true), s, 400);
                CHECK(max_abs_anomaly(apply_filter(flat, daf_weights(m, s, kernel))) < 1e-9);
                CHECK(max_abs_anomaly(apply_filter(sloped, regularized_weights(m, s, 1.0, kernel))) < 1e-9);
                CHECK(max_abs_anomaly(apply_filter(sloped, two_sided_weights(m, s, kernel))) < 1e-9);
            }
        }
    }
}

TEST_CASE("the no-trend DAF lags a trend by beta1 j*_{0c}") {
    const int s = 12, m = 10;
    TrigParams p = TrigParams::zero(s);
    p.beta1 = 0.01;
    const auto y = normal_series(p, s, 300);
    const auto r = apply_filter(y, daf_weights(m, s));
    const auto c = causal_components(m, s, KernelSpec::uniform());
    // mu_hat = mu - beta1 * j*_{0c}: the estimate trails the trend.
    CHECK(r.anomalies[299] == doctest::Approx(p.beta1 * c.j0c_star).epsilon(1e-9));
    CHECK(c.j0c_star == doctest::Approx(s * m / 2.0));
}

TEST_CASE("apply_filter matches direct convolution and masks windows with gaps") {
    Rng rng(3);
    std::vector<double> v(200);
    for (auto& x : v) x = rng.normal();
    const SeasonalSeries y(v, 4);
    const auto w = regularized_weights(5, 4, 0.3, KernelSpec::seasonal(1));
    const auto r = apply_filter(y, w);
    const auto ref = oracle::convolve(v, w.weights, w.first_offset);
    CHECK(r.valid_from == 20);
    CHECK(r.valid_to == 200);
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (std::isnan(ref[t])) {
            CHECK(r.normals.missing(t));
        } else {
            CHECK(r.normals[t] == doctest::Approx(ref[t]).epsilon(1e-12));
            CHECK(r.normals[t] + r.anomalies[t] == doctest::Approx(v[t]).epsilon(1e-12));
        }
    }

    std::vector<bool> mask(200, false);
    mask[100] = true;
    v[100] = std::nan("");
    const SeasonalSeries gappy(v, mask, 4);
    const auto g = apply_filter(gappy, concurrent_weights(2, 4));
    CHECK(g.normals.missing(100));
    CHECK(g.normals.missing(104));
    CHECK(g.normals.missing(108));
    CHECK_FALSE(g.normals.missing(101));  // zero weight at lag 1
    CHECK_FALSE(g.normals.missing(112));

    const SeasonalSeries tiny(std::vector<double>(5, 1.0), 4);
    CHECK_THROWS_AS(apply_filter(tiny, daf_weights(2, 4)), CoverageError);
    CHECK_THROWS_AS(apply_filter(tiny, daf_weights(1, 2)), Error);
}

TEST_CASE("apply_filter is translation equivariant") {
    Rng rng(5);
    std::vector<double> v(120), shifted(120);
    for (std::size_t t = 0; t < v.size(); ++t) {
        v[t] = rng.normal();
        shifted[t] = v[t] + 7.5;
    }
    const auto w = regularized_weights(3, 12, 0.7);
    const auto a = apply_filter(SeasonalSeries(v, 12), w);
    const auto b = apply_filter(SeasonalSeries(shifted, 12), w);
    for (std::size_t t = a.valid_from; t < a.valid_to; ++t) {
        CHECK(b.normals[t] - a.normals[t] == doctest::Approx(7.5).epsilon(1e-12));
        CHECK(b.anomalies[t] == doctest::Approx(a.anomalies[t]).epsilon(1e-9));
    }
}

TEST_CASE("concurrent anomalies are declining-weight sums of seasonal differences") {
    Rng rng(11);
    for (int s : {4, 12}) {
        for (int m : {1, 5, 29}) {
            std::vector<double> v(static_cast<std::size_t>(s * (m + 5)));
            for (auto& x : v) x = rng.normal() + 3.0;
            const SeasonalSeries y(v, s);
            const auto r = apply_filter(y, concurrent_weights(m, s));
            for (std::size_t t = r.valid_from; t < r.valid_to; ++t) {
                double sum = 0.0;
                for (int i = 1; i <= m; ++i) {
                    const std::size_t a = t - static_cast<std::size_t>(s * (i - 1));
                    sum += (m + 1.0 - i) / (m + 1.0) * (v[a] - v[a - static_cast<std::size_t>(s)]);
                }
                CHECK(r.anomalies[t] == doctest::Approx(sum).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("WMO reference periods") {
    std::vector<double> v;
    for (int year = 1951; year <= 2030; ++year)
        for (int month = 1; month <= 12; ++month) v.push_back(year * 100.0 + month);
    const SeasonalSeries y(v, 12, 1951, 1);

    const auto dec2024 = static_cast<std::size_t>(y.index_of(2024, 12));
    CHECK(wmo_reference_end(y, dec2024, 10) == y.index_of(2020, 12));
    CHECK(wmo_reference_end(y, static_cast<std::size_t>(y.index_of(2020, 12)), 10) == y.index_of(2010, 12));
    CHECK(wmo_reference_end(y, dec2024, 5) == y.index_of(2020, 12));
    CHECK(wmo_reference_end(y, static_cast<std::size_t>(y.index_of(2026, 3)), 5) == y.index_of(2025, 12));
    CHECK_THROWS_AS(wmo_reference_end(y, dec2024, 7), Error);

    const auto r = apply_wmo(y, 29, 10);
    // Mean of the December values 1991..2020.
    CHECK(r.normals[dec2024] == doctest::Approx(2005.5 * 100 + 12));
    // Frozen between updates.
    for (int month = 1; month <= 12; ++month) {
        const auto first = static_cast<std::size_t>(y.index_of(2021, month));
        for (int year = 2022; year <= 2030; ++year) {
            CHECK(r.normals[static_cast<std::size_t>(y.index_of(year, month))] == r.normals[first]);
        }
    }
    // 1951..1980 is the first complete reference period.
    CHECK(r.valid_from == static_cast<std::size_t>(y.index_of(1981, 1)));

    const auto single = apply_wmo(y, 0, 10);
    CHECK(single.normals[dec2024] == y[static_cast<std::size_t>(y.index_of(2020, 12))]);

    const auto w = wmo_weights(29, 12, static_cast<long long>(dec2024), y.index_of(2020, 12));
    CHECK(w.first_offset == 48);
    CHECK(w.sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(wmo_weights(29, 12, 100, 50), CoverageError);
}
