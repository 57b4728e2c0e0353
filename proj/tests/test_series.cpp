#include <doctest.h>

#include <lmpmime/lmpmime.hpp>

#include <cmath>
#include <sstream>

using namespace lmpmime;

static MultivariateSeries random_series(std::size_t n, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    MultivariateSeries s;
    s.data = Matrix(n, k);
    for (auto& v : s.data.a) v = rng.normal();
    s.labels = default_labels(k);
    return s;
}

TEST_CASE("standardize: symmetric three-point column") {
    MultivariateSeries s;
    s.data = Matrix(3, 2);
    s.data(0, 0) = 1; s.data(1, 0) = 2; s.data(2, 0) = 3;
    s.data(0, 1) = 7; s.data(1, 1) = 0; s.data(2, 1) = -7;
    s.labels = default_labels(2);
    auto z = standardize(s);
    CHECK(z.data(0, 0) == doctest::Approx(-1.0));
    CHECK(z.data(1, 0) == doctest::Approx(0.0));
    CHECK(z.data(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("standardize: idempotent within 1e-9") {
    auto s = random_series(200, 3, 11);
    auto z1 = standardize(s);
    auto z2 = standardize(z1);
    for (std::size_t i = 0; i < z1.data.a.size(); ++i)
        CHECK(std::fabs(z1.data.a[i] - z2.data.a[i]) < 1e-9);
}

TEST_CASE("standardize: constant column rejected") {
    MultivariateSeries s;
    s.data = Matrix(3, 2);
    s.data(0, 0) = 5; s.data(1, 0) = 5; s.data(2, 0) = 5;
    s.data(0, 1) = 1; s.data(1, 1) = 2; s.data(2, 1) = 3;
    s.labels = default_labels(2);
    CHECK_THROWS_AS(standardize(s), ConstantColumnError);
}

TEST_CASE("candidate set: enumeration and order") {
    auto c = build_candidate_set(2, 2);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == LaggedVariable{0, 1});
    CHECK(c[1] == LaggedVariable{0, 2});
    CHECK(c[2] == LaggedVariable{1, 1});
    CHECK(c[3] == LaggedVariable{1, 2});

    CHECK(build_candidate_set(5, 6).size() == 30);

    auto c31 = build_candidate_set(3, 1);
    REQUIRE(c31.size() == 3);
    CHECK(c31[2] == LaggedVariable{2, 1});

    CHECK(build_candidate_set(3, 4) == build_candidate_set(3, 4));
}

TEST_CASE("align: index arithmetic") {
    auto s = random_series(10, 2, 3);
    auto cands = build_candidate_set(2, 2);
    auto a = align(s, 0, cands, 1);
    CHECK(a.n_eff() == 8);
    // column (j=0, lag=1) row 0 refers to data[L-1][0]
    CHECK(a.columns(0, 0) == s.data(1, 0));
}

TEST_CASE("align: brute-force re-derivation on a random 4x20 series") {
    auto s = random_series(20, 4, 99);
    const int L = 3, h = 1;
    auto cands = build_candidate_set(4, L);
    auto a = align(s, 2, cands, h);
    REQUIRE(a.n_eff() == 20 - L - (h - 1));
    for (std::size_t t = 0; t < a.n_eff(); ++t) {
        CHECK(a.target[t] == s.data(t + L + h - 1, 2));
        for (std::size_t c = 0; c < cands.size(); ++c) {
            const auto& cd = cands[c];
            CHECK(a.columns(t, c) ==
                  s.data(t + L - static_cast<std::size_t>(cd.lag),
                         static_cast<std::size_t>(cd.var_index)));
        }
    }
}

TEST_CASE("align: too-short series rejected") {
    auto s = random_series(4, 2, 1);
    auto cands = build_candidate_set(2, 4);
    CHECK_THROWS_AS(align(s, 0, cands, 1), SeriesTooShortError);
}

TEST_CASE("align: truncated columns keep small means after standardization") {
    auto s = random_series(512, 3, 21);
    auto z = standardize(s);
    auto a = align(z, 1, build_candidate_set(3, 5), 1);
    for (std::size_t c = 0; c < a.columns.cols; ++c) {
        double m = 0;
        for (std::size_t t = 0; t < a.n_eff(); ++t) m += a.columns(t, c);
        m /= static_cast<double>(a.n_eff());
        CHECK(std::fabs(m) < 0.1);
    }
}

TEST_CASE("csv: round trip preserves values and labels") {
    auto s = random_series(50, 3, 7);
    s.labels = {"a", "b", "c"};
    std::stringstream ss;
    write_csv(ss, s);
    auto r = read_csv(ss);
    REQUIRE(r.n() == s.n());
    REQUIRE(r.k() == s.k());
    CHECK(r.labels == s.labels);
    for (std::size_t i = 0; i < s.data.a.size(); ++i) CHECK(r.data.a[i] == s.data.a[i]);
}

TEST_CASE("csv: headerless input gets default labels") {
    std::stringstream ss("1,2\n3,4\n5,6\n");
    auto r = read_csv(ss);
    CHECK(r.labels == std::vector<std::string>{"x1", "x2"});
    CHECK(r.n() == 3);
}

TEST_CASE("csv: downsample keeps every q-th row") {
    std::stringstream ss;
    for (int i = 0; i < 4000; ++i) ss << i << "," << -i << "\n";
    auto r = read_csv(ss, 4);
    CHECK(r.n() == 1000);
    CHECK(r.data(1, 0) == 4.0);
}

TEST_CASE("csv: bad value reported with line number") {
    std::stringstream ss("1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(read_csv(ss), doctest::Contains("line 2"), std::runtime_error);
}

TEST_CASE("csv: empty input rejected") {
    std::stringstream ss("");
    CHECK_THROWS(read_csv(ss));
}
