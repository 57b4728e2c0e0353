#include <doctest.h>

#include <lmpmime/lmpmime.hpp>

#include <cmath>

using namespace lmpmime;

namespace {

// correlated standard-normal pair with correlation rho
void gaussian_pair(std::size_t n, double rho, Rng& rng, Matrix& x, Matrix& y) {
    x = Matrix(n, 1);
    y = Matrix(n, 1);
    const double c = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        double a = rng.normal(), b = rng.normal();
        x(i, 0) = a;
        y(i, 0) = rho * a + c * b;
    }
}

} // namespace

TEST_CASE("gaussian mutual information oracle") {
    EstimatorConfig cfg;
    cfg.k_nn = 5;
    for (double rho : {0.3, 0.6, 0.9}) {
        const double truth = -0.5 * std::log(1.0 - rho * rho);
        double mean = 0.0;
        const int seeds = 20;
        for (int s = 0; s < seeds; ++s) {
            Rng rng(splitmix64(1000 + static_cast<std::uint64_t>(s)));
            Matrix x, y;
            gaussian_pair(2000, rho, rng, x, y);
            mean += mutual_information(x, y, cfg);
        }
        mean /= seeds;
        CHECK(std::fabs(mean - truth) < 0.05);
    }
}

TEST_CASE("independent noise gives MI near zero") {
    EstimatorConfig cfg;
    double mean = 0.0;
    for (int s = 0; s < 10; ++s) {
        Rng rng(splitmix64(77 + static_cast<std::uint64_t>(s)));
        Matrix x(2000, 1), y(2000, 1);
        for (auto& v : x.a) v = rng.uniform();
        for (auto& v : y.a) v = rng.uniform();
        mean += mutual_information(x, y, cfg);
    }
    mean /= 10;
    CHECK(std::fabs(mean) < 0.05);
}

TEST_CASE("cmi with empty conditioning equals mi bit-exactly") {
    Rng rng(5);
    Matrix x, y;
    gaussian_pair(500, 0.6, rng, x, y);
    EstimatorConfig cfg;
    CHECK(mutual_information(x, y, cfg) == conditional_mutual_information(x, y, Matrix(), cfg));
}

TEST_CASE("mi is exactly symmetric in its arguments") {
    Rng rng(9);
    Matrix x, y;
    gaussian_pair(400, 0.4, rng, x, y);
    EstimatorConfig cfg;
    CHECK(mutual_information(x, y, cfg) == mutual_information(y, x, cfg));
}

TEST_CASE("conditional independence: common driver explains the dependence") {
    // x = z + noise, y = z + noise: I(x;y) large, I(x;y|z) near zero
    EstimatorConfig cfg;
    double mi_mean = 0.0, cmi_mean = 0.0;
    for (int s = 0; s < 10; ++s) {
        Rng rng(splitmix64(31 + static_cast<std::uint64_t>(s)));
        const std::size_t n = 2000;
        Matrix x(n, 1), y(n, 1), z(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            double zz = rng.normal();
            z(i, 0) = zz;
            x(i, 0) = zz + 0.5 * rng.normal();
            y(i, 0) = zz + 0.5 * rng.normal();
        }
        mi_mean += mutual_information(x, y, cfg);
        cmi_mean += conditional_mutual_information(x, y, z, cfg);
    }
    mi_mean /= 10;
    cmi_mean /= 10;
    CHECK(mi_mean > 0.2);
    CHECK(std::fabs(cmi_mean) < 0.07);
}

TEST_CASE("kd-tree and brute-force paths agree exactly") {
    Rng rng(13);
    for (int inst = 0; inst < 5; ++inst) {
        Matrix x(300, 1), y(300, 1), z(300, 2);
        for (auto& v : x.a) v = rng.normal();
        for (auto& v : y.a) v = 0.5 * rng.normal();
        for (auto& v : z.a) v = rng.normal();
        EstimatorConfig kd, bf;
        bf.search = NeighborSearch::brute_force;
        CHECK(conditional_mutual_information(x, y, z, kd) ==
              conditional_mutual_information(x, y, z, bf));
        CHECK(mutual_information(x, y, kd) == mutual_information(x, y, bf));
    }
}

TEST_CASE("adding an independent noise conditioning column is a small perturbation") {
    Rng rng(17);
    const std::size_t n = 2000;
    Matrix x, y;
    gaussian_pair(n, 0.6, rng, x, y);
    Matrix z0, z1(n, 1);
    for (auto& v : z1.a) v = rng.normal();
    EstimatorConfig cfg;
    double base = conditional_mutual_information(x, y, z0, cfg);
    double with_noise = conditional_mutual_information(x, y, z1, cfg);
    CHECK(std::fabs(base - with_noise) < 0.1);
}

TEST_CASE("estimator is deterministic") {
    Rng rng(23);
    Matrix x, y;
    gaussian_pair(300, 0.5, rng, x, y);
    EstimatorConfig cfg;
    double a = mutual_information(x, y, cfg);
    double b = mutual_information(x, y, cfg);
    CHECK(a == b);
}

TEST_CASE("ties broken identically regardless of argument block") {
    // constant-heavy integer data would produce massive ties without jitter
    Matrix x(100, 1), y(100, 1);
    for (std::size_t i = 0; i < 100; ++i) {
        x(i, 0) = static_cast<double>(i % 4);
        y(i, 0) = static_cast<double>((i / 4) % 4);
    }
    EstimatorConfig cfg;
    double v = mutual_information(x, y, cfg);
    CHECK(std::isfinite(v));
    CHECK(v == mutual_information(y, x, cfg));
}

TEST_CASE("argument validation") {
    Matrix x(50, 1, 0.5), y(40, 1, 0.5);
    EstimatorConfig cfg;
    CHECK_THROWS_AS(mutual_information(x, y, cfg), std::invalid_argument);
    Matrix tiny(4, 1, 1.0);
    CHECK_THROWS_AS(mutual_information(tiny, tiny, cfg), TooFewSamplesError);
}
