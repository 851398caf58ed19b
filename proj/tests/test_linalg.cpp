// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "gzspec/json_io.hpp"
#include "gzspec/linalg.hpp"

using namespace gzspec;
using Cd = std::complex<double>;

namespace {

const ToleranceConfig cfg = ToleranceConfig::defaults();

ComplexMatrix jordan_block(Eigen::Index k, Cd lambda) {
    ComplexMatrix j = ComplexMatrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) j(i, i) = lambda;
    for (Eigen::Index i = 0; i + 1 < k; ++i) j(i, i + 1) = 1.0;
    return j;
}

ComplexMatrix diag2(Cd a, Cd b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Random similarity transform with controlled condition number.
ComplexMatrix random_similarity(const ComplexMatrix& a, std::mt19937_64& rng, double cond) {
    const Eigen::Index n = a.rows();
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(n, n), h(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            g(i, j) = {gauss(rng), gauss(rng)};
            h(i, j) = {gauss(rng), gauss(rng)};
        }
    ComplexMatrix q1 = Eigen::HouseholderQR<ComplexMatrix>(g).householderQ();
    ComplexMatrix q2 = Eigen::HouseholderQR<ComplexMatrix>(h).householderQ();
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double t = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
        d(i, i) = std::pow(cond, t);
    }
    ComplexMatrix s = q1 * d * q2;
    return s * a * s.inverse();
}

}  // namespace

TEST_CASE("rank and kernel on small fixtures") {
    ComplexMatrix d = diag2(3.0, 0.0);
    CHECK(numerical_rank(d, cfg) == 1);
    SubspaceBasis k = kernel_basis(d, cfg);
    REQUIRE(k.dim() == 1);
    CHECK(std::abs(k.basis(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(k.basis(0, 0)) == doctest::Approx(0.0));

    ComplexMatrix j2 = jordan_block(2, 0.0);
    CHECK(numerical_rank(j2, cfg) == 1);
    SubspaceBasis kj = kernel_basis(j2, cfg);
    REQUIRE(kj.dim() == 1);
    CHECK(std::abs(kj.basis(0, 0)) == doctest::Approx(1.0));
    SubspaceBasis rj = range_basis(j2, cfg);
    REQUIRE(rj.dim() == 1);
    CHECK(std::abs(rj.basis(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("rank of a constructed low-rank product") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix b(6, 4), c(4, 6);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            b(i, j) = {gauss(rng), gauss(rng)};
            c(j, i) = {gauss(rng), gauss(rng)};
        }
    CHECK(numerical_rank(b * c, cfg) == 4);
}

TEST_CASE("ascent and descent") {
    CHECK(ascent(jordan_block(3, 0.0), cfg) == 3);
    CHECK(descent(jordan_block(3, 0.0), cfg) == 3);
    CHECK(ascent(diag2(0.0, 1.0), cfg) == 1);
    ComplexMatrix inv = diag2(2.0, Cd(0, 1));
    CHECK(ascent(inv, cfg) == 0);
    CHECK(descent(inv, cfg) == 0);
}

TEST_CASE("dis: degree of stable iteration") {
    CHECK(dis(jordan_block(3, 0.0), cfg) == 3);
    CHECK(dis(diag2(2.0, 3.0), cfg) == 0);
    CHECK(dis(diag2(2.0, 0.0), cfg) == 1);
}

TEST_CASE("gamma: reduced minimal modulus") {
    CHECK(gamma(diag2(3.0, 4.0), cfg) == doctest::Approx(3.0));
    CHECK(gamma(jordan_block(2, 0.0), cfg) == doctest::Approx(1.0));
    ComplexMatrix rot(2, 2);
    rot << Cd(0.6), Cd(-0.8), Cd(0.8), Cd(0.6);
    CHECK(gamma(rot, cfg) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gamma(ComplexMatrix::Zero(2, 2), cfg), Error);
}

TEST_CASE("h0 and k bases") {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a(2, 2) = 2.0;
    SubspaceBasis h0 = h0_basis(a, cfg);
    SubspaceBasis k = k_basis(a, cfg);
    CHECK(h0.dim() == 2);
    CHECK(k.dim() == 1);
    CHECK(std::abs(k.basis(2, 0)) == doctest::Approx(1.0));

    ComplexMatrix j2 = jordan_block(2, 0.0);
    CHECK(h0_basis(j2, cfg).dim() == 2);
    CHECK(k_basis(j2, cfg).dim() == 0);

    ComplexMatrix inv = diag2(1.0, 5.0);
    CHECK(h0_basis(inv, cfg).dim() == 0);
    CHECK(k_basis(inv, cfg).dim() == 2);
}

TEST_CASE("eigenvalues on fixtures") {
    auto ev = eigenvalues(diag2(1.0, 3.0));
    std::sort(ev.begin(), ev.end(), [](Cd a, Cd b) { return a.real() < b.real(); });
    CHECK(std::abs(ev[0] - Cd(1.0)) < 1e-12);
    CHECK(std::abs(ev[1] - Cd(3.0)) < 1e-12);

    auto ev2 = eigenvalues(jordan_block(2, 0.0));
    CHECK(std::abs(ev2[0]) < 1e-8);
    CHECK(std::abs(ev2[1]) < 1e-8);

    ComplexMatrix tri(2, 2);
    tri << Cd(1), Cd(1), Cd(0), Cd(3);
    auto ev3 = eigenvalues(tri);
    std::sort(ev3.begin(), ev3.end(), [](Cd a, Cd b) { return a.real() < b.real(); });
    CHECK(std::abs(ev3[0] - Cd(1.0)) < 1e-12);
    CHECK(std::abs(ev3[1] - Cd(3.0)) < 1e-12);
}

TEST_CASE("direct sum, adjoint, power") {
    ComplexMatrix one(1, 1), two(1, 1);
    one(0, 0) = 1.0;
    two(0, 0) = 2.0;
    ComplexMatrix ds = direct_sum(one, two);
    CHECK(ds.rows() == 2);
    CHECK(ds(0, 0) == Cd(1.0));
    CHECK(ds(1, 1) == Cd(2.0));
    CHECK(ds(0, 1) == Cd(0.0));

    ComplexMatrix j2 = jordan_block(2, 0.0);
    ComplexMatrix adj = adjoint(j2);
    CHECK(adj(1, 0) == Cd(1.0));
    CHECK(adj(0, 1) == Cd(0.0));
    CHECK(kernel_basis(adj, cfg).dim() == numerical_rank(j2, cfg) * 0 + 1);

    CHECK(matrix_power(jordan_block(3, 0.0), 3).norm() == doctest::Approx(0.0));
}

TEST_CASE("adjoint swaps kernel and cokernel dimensions") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix b(5, 2), c(2, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) {
            b(i, j) = {gauss(rng), gauss(rng)};
            c(j, i) = {gauss(rng), gauss(rng)};
        }
    ComplexMatrix a = b * c;  // rank 2, 5x5
    Eigen::Index alpha = kernel_basis(a, cfg).dim();
    Eigen::Index beta = a.cols() - numerical_rank(a, cfg);
    CHECK(kernel_basis(adjoint(a), cfg).dim() == beta);
    CHECK(alpha == beta);
}

TEST_CASE("invariant: rank + kernel dim = cols") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        ComplexMatrix a(4, 4);
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = {gauss(rng), gauss(rng)};
        if (t % 2) a.col(3) = a.col(0);  // force rank deficiency half the time
        CHECK(numerical_rank(a, cfg) + kernel_basis(a, cfg).dim() == 4);
    }
}

TEST_CASE("invariant: ascent = descent = dis on similarity transforms of Jordan seeds") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 12; ++t) {
        ComplexMatrix seed = direct_sum(jordan_block(1 + t % 3, 0.0),
                                        jordan_block(2, Cd(1.5, -0.5)));
        ComplexMatrix a = random_similarity(seed, rng, 1e3);
        Eigen::Index p = ascent(a, cfg);
        Eigen::Index q = descent(a, cfg);
        Eigen::Index d = dis(a, cfg);
        CHECK(p == q);
        CHECK(p == d);
        CHECK(p == 1 + t % 3);
    }
}

TEST_CASE("invariant: gamma bounds ||Ax|| over distance to kernel") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix a = diag2(2.0, 0.0);
    a(0, 1) = 1.0;  // kernel is span{(1,-2)/sqrt5}
    double g = gamma(a, cfg);
    SubspaceBasis kb = kernel_basis(a, cfg);
    ComplexMatrix proj = kb.basis * kb.basis.adjoint();
    for (int t = 0; t < 100; ++t) {
        ComplexVector x(2);
        x << Cd(gauss(rng), gauss(rng)), Cd(gauss(rng), gauss(rng));
        x.normalize();
        double dist = (x - proj * x).norm();
        CHECK((a * x).norm() >= g * dist - 1e-8);
    }
}

TEST_CASE("invariant: H0 and K are complementary") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 8; ++t) {
        ComplexMatrix seed =
            direct_sum(jordan_block(2, 0.0), jordan_block(2, Cd(0.8, 0.3)));
        ComplexMatrix a = random_similarity(seed, rng, 1e2);
        SubspaceBasis h0 = h0_basis(a, cfg);
        SubspaceBasis k = k_basis(a, cfg);
        CHECK(h0.dim() + k.dim() == 4);
        CHECK(subspace_sum_dim(h0, k, cfg) == 4);
        CHECK(subspace_intersection_dim(h0, k, cfg) == 0);
    }
}

TEST_CASE("subspace intersection: rank formula agrees with principal angles") {
    // span{e1,e2} n span{e2,e3} = span{e2} in C^3
    ComplexMatrix u = ComplexMatrix::Zero(3, 2), v = ComplexMatrix::Zero(3, 2);
    u(0, 0) = 1;
    u(1, 1) = 1;
    v(1, 0) = 1;
    v(2, 1) = 1;
    SubspaceBasis ub{u}, vb{v};
    CHECK(subspace_intersection_dim(ub, vb, cfg) == 1);
    SubspaceBasis inter = subspace_intersection_basis(ub, vb, cfg);
    REQUIRE(inter.dim() == 1);
    CHECK(std::abs(inter.basis(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("matrix JSON round trip") {
    ComplexMatrix a(2, 3);
    a << Cd(1, 2), Cd(0, -1), Cd(3), Cd(-0.5, 0.25), Cd(0), Cd(7, 7);
    Json j = matrix_to_json(a);
    ComplexMatrix back = matrix_from_json(j);
    CHECK((a - back).norm() == 0.0);

    Json badj = j;
    badj["entries"][0][0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matrix_from_json(badj), Error);
}
