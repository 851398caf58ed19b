// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "gzspec/calculus.hpp"
#include "gzspec/operator_model.hpp"

using namespace gzspec;
using Cd = std::complex<double>;
using Tier = Classification::Tier;

namespace {

ExactComplex ec(long re, long im = 0) { return ExactComplex(re, im); }
ExactComplex ecq(long n, long d) { return {make_rational(n, d), Rational(0)}; }

// Diagonal operator with entries 1/n.
OperatorModel harmonic_diagonal() {
    DiagonalModel d;
    d.cluster_entries.push_back(make_cluster(ec(0), PowerTail{ec(1), 1}));
    return make_diagonal_model(std::move(d));
}

OperatorModel left_shift() {
    return make_shift_model({ShiftDirection::left, ConstantWeights{Rational(1), {}}});
}

OperatorModel right_shift() {
    return make_shift_model({ShiftDirection::right, ConstantWeights{Rational(1), {}}});
}

// Q(x1, x2, ...) = (0, x1, x2/2, ...): right shift with weights 1/n.
OperatorModel quasi_nilpotent_shift() {
    return make_shift_model({ShiftDirection::right, NullWeights{PowerTail{ec(1), 1}}});
}

OperatorModel finite_diag(std::vector<long> entries) {
    DiagonalModel d;
    for (long v : entries) d.point_entries.push_back({ec(v), 1});
    return make_diagonal_model(std::move(d));
}

}  // namespace

TEST_CASE("spectrum: quasi-nilpotent weighted shift is {0}") {
    OperatorSpectrum sp = spectrum(quasi_nilpotent_shift());
    CHECK(sp.pure_countable());
    REQUIRE(sp.countable.points.size() == 1);
    CHECK(sp.countable.points[0] == ec(0));
    CHECK(sp.countable.clusters.empty());
}

TEST_CASE("spectrum: harmonic diagonal is the closed harmonic set") {
    OperatorSpectrum sp = spectrum(harmonic_diagonal());
    CHECK(sp.pure_countable());
    CHECK(sp.countable.contains(ecq(1, 5)));
    CHECK(sp.countable.contains(ec(0)));
    CHECK_FALSE(sp.countable.contains(ecq(2, 5)));
}

TEST_CASE("spectrum: direct sum unions the parts") {
    OperatorModel m = make_direct_sum(
        {harmonic_diagonal(), make_matrix_model(5.0 * ComplexMatrix::Identity(1, 1))});
    OperatorSpectrum sp = spectrum(m);
    CHECK(sp.countable.contains(ec(5)));
    CHECK(sp.countable.contains(ecq(1, 3)));
    CHECK(classify_zero(sp.countable) == SpectralClass::GzInvertible);
}

TEST_CASE("spectrum: constant-weight shift is an opaque disk") {
    OperatorSpectrum sp = spectrum(left_shift());
    REQUIRE(sp.disks.size() == 1);
    CHECK(sp.disks[0].radius_sq == Rational(1));
}

TEST_CASE("point_data on the harmonic diagonal") {
    OperatorModel m = harmonic_diagonal();
    PointData at_half = point_data(m, ecq(1, 2));
    CHECK(at_half.alpha == ExtendedNat::of(1));
    CHECK(at_half.beta == ExtendedNat::of(1));
    CHECK(at_half.isolated);
    CHECK(at_half.in_spectrum);

    PointData at_minus_one = point_data(m, ec(-1));
    CHECK_FALSE(at_minus_one.in_spectrum);
    CHECK(at_minus_one.alpha == ExtendedNat::of(0));

    PointData at_zero = point_data(m, ec(0));
    CHECK(at_zero.in_spectrum);
    CHECK_FALSE(at_zero.isolated);
    CHECK(at_zero.alpha == ExtendedNat::of(0));  // 0 is not an entry
}

TEST_CASE("point_data on shifts") {
    PointData left0 = point_data(left_shift(), ec(0));
    CHECK(left0.alpha == ExtendedNat::of(1));
    CHECK(left0.beta == ExtendedNat::of(0));
    CHECK(left0.in_spectrum);
    CHECK_FALSE(left0.isolated);

    PointData right0 = point_data(right_shift(), ec(0));
    CHECK(right0.alpha == ExtendedNat::of(0));
    CHECK(right0.beta == ExtendedNat::of(1));

    CHECK_THROWS_AS(point_data(left_shift(), ecq(1, 2)), Error);  // interior query
    PointData boundary = point_data(left_shift(), ec(1));
    CHECK(boundary.alpha == ExtendedNat::of(0));
    CHECK(boundary.beta.infinite);
}

TEST_CASE("index laws on shift models") {
    CHECK(index_at(left_shift(), ec(0)) == 1);
    CHECK(index_at(right_shift(), ec(0)) == -1);
    CHECK(index_at(adjoint_model(left_shift()), ec(0)) == -1);
    CHECK(index_at(make_power(left_shift(), 3), ec(0)) == 3);
    CHECK(index_at(make_direct_sum({left_shift(), right_shift()}), ec(0)) == 0);

    // not semi-Fredholm cases
    CHECK_THROWS_AS(index_at(quasi_nilpotent_shift(), ec(0)), Error);
    CHECK_THROWS_AS(index_at(left_shift(), ec(1)), Error);  // boundary: range not closed
}

TEST_CASE("classify on the harmonic diagonal") {
    OperatorModel m = harmonic_diagonal();
    Classification at0 = classify(m, ec(0));
    CHECK(at0.tier == Tier::gz_invertible);
    CHECK(at0.in_acc);
    CHECK_FALSE(at0.in_acc_acc);

    Classification at_half = classify(m, ecq(1, 2));
    CHECK(at_half.tier == Tier::drazin);
    CHECK(at_half.browder);

    Classification at7 = classify(m, ec(7));
    CHECK(at7.tier == Tier::invertible);
}

TEST_CASE("classify on a finite matrix: drazin, not invertible") {
    OperatorModel m = make_matrix_model([] {
        ComplexMatrix a = ComplexMatrix::Zero(2, 2);
        a(1, 1) = 1.0;
        return a;
    }());
    Classification at0 = classify(m, ec(0));
    CHECK(at0.tier == Tier::drazin);
    CHECK(at0.browder);
    CHECK(at0.in_spectrum);
}

TEST_CASE("classify the quasi-nilpotent shift at 0: generalized Drazin, not Drazin") {
    Classification at0 = classify(quasi_nilpotent_shift(), ec(0));
    CHECK(at0.tier == Tier::generalized_drazin);
    CHECK_FALSE(at0.in_acc);
}

TEST_CASE("classify: depth-2 diagonal is not gz-invertible at 0") {
    DiagonalModel d;
    d.cluster_entries.push_back(make_cluster(
        ec(0), PowerTail{ec(1), 1}, 0, {}, TailSpec{GeometricTail{ec(1), make_rational(1, 4)}}));
    OperatorModel m = make_diagonal_model(std::move(d));
    Classification at0 = classify(m, ec(0));
    CHECK(at0.tier == Tier::none);
    CHECK(at0.in_acc_acc);
}

TEST_CASE("classify agrees with the spectral tier characterization") {
    // classify(m, 0) = GzInvertible <=> 0 not in acc_acc(spectrum(m))
    OperatorModel gz = harmonic_diagonal();
    OperatorSpectrum sp = spectrum(gz);
    bool in_acc_acc = false;
    for (const auto& v : acc_acc(sp.countable))
        if (v == ec(0)) in_acc_acc = true;
    CHECK_FALSE(in_acc_acc);
    CHECK(classify(gz, ec(0)).tier == Tier::gz_invertible);
}

TEST_CASE("one-sided annotations on shifts") {
    Classification left0 = classify(left_shift(), ec(0));
    CHECK(left0.right_invertible);   // surjective
    CHECK_FALSE(left0.left_invertible);
    Classification right0 = classify(right_shift(), ec(0));
    CHECK(right0.left_invertible);   // bounded below
    CHECK_FALSE(right0.right_invertible);
}

TEST_CASE("adjoint duality for index and diagonal entries") {
    OperatorModel l = left_shift();
    CHECK(index_at(adjoint_model(l), ec(0)) == -index_at(l, ec(0)));

    // adjoint of Diagonal(i/n) has entries -i/n
    DiagonalModel d;
    d.cluster_entries.push_back(make_cluster(ec(0), PowerTail{ExactComplex(0, 1), 1}));
    OperatorModel m = make_diagonal_model(std::move(d));
    OperatorModel adj = adjoint_model(m);
    auto entries = diagonal_entries(adj, 2);
    CHECK(entries[0] == ExactComplex(0, -1));

    OperatorModel mixed = make_direct_sum({left_shift(), std::move(m)});
    OperatorModel mixed_adj = adjoint_model(mixed);
    CHECK(mixed_adj.children[0].shift.direction == ShiftDirection::right);
}

TEST_CASE("gz_inverse_diagonal: harmonic with two terms moved out") {
    OperatorModel m = harmonic_diagonal();
    SpectralSetSelection sigma;
    sigma.selected_clusters = {{0, ClusterMode::whole}};
    sigma.boundary_moves = {{0, 1}, {0, 2}};  // keep 1 and 1/2 invertible
    auto [inv, cert] = gz_inverse_diagonal(m, sigma);

    auto entries = diagonal_entries(inv, 3);
    // zero entry block first, then the moved-out reciprocals 1, 2
    bool has_one = false, has_two = false;
    for (const auto& e : diagonal_entries(inv, 8)) {
        if (e == ec(1)) has_one = true;
        if (e == ec(2)) has_two = true;
    }
    CHECK(has_one);
    CHECK(has_two);

    CHECK(cert.core_zeroloid);
    CHECK(cert.inner_identity);
    CHECK(cert.inverse_regularity);
    CHECK(cert.spectrum_matches);
    SpectrumModel s_spec = spectrum(inv).countable;
    CHECK(s_spec.contains(ec(0)));
    CHECK(s_spec.contains(ec(1)));
    CHECK(s_spec.contains(ec(2)));
    CHECK_FALSE(s_spec.contains(ec(3)));
    CHECK(s_spec.clusters.empty());
}

TEST_CASE("gz_inverse_diagonal: finite diagonal with empty sigma is the plain inverse") {
    OperatorModel m = finite_diag({2, 5});
    SpectralSetSelection sigma;
    auto [inv, cert] = gz_inverse_diagonal(m, sigma);
    auto entries = diagonal_entries(inv, 2);
    CHECK(((entries[0] == ecq(1, 2) && entries[1] == ecq(1, 5)) ||
           (entries[0] == ecq(1, 5) && entries[1] == ecq(1, 2))));
    CHECK(cert.core_zeroloid);  // empty sigma: T^2 S - T = 0
    OperatorSpectrum sp = spectrum(inv);
    CHECK_FALSE(sp.countable.contains(ec(0)));
}

TEST_CASE("gz_inverse_diagonal: infinite-multiplicity zero block") {
    DiagonalModel d;
    d.point_entries.push_back({ec(0), std::nullopt});
    d.point_entries.push_back({ec(3), 1});
    OperatorModel m = make_diagonal_model(std::move(d));
    SpectralSetSelection sigma;
    sigma.selected_points = {0};  // the 0 point (canonically sorted first)
    auto [inv, cert] = gz_inverse_diagonal(m, sigma);
    bool has_third = false;
    for (const auto& e : diagonal_entries(inv, 6))
        if (e == ecq(1, 3)) has_third = true;
    CHECK(has_third);
    CHECK(cert.core_zeroloid);  // T^2 S - T = -T on the 0 block = 0
    CHECK(cert.spectrum_matches);
}

TEST_CASE("gz_inverse_diagonal rejects selections leaving 0 outside sigma") {
    OperatorModel m = finite_diag({2, 0});
    SpectralSetSelection sigma;  // selects nothing; 0 stays in the complement
    CHECK_THROWS_AS(gz_inverse_diagonal(m, sigma), Error);
}

TEST_CASE("perturbation preserves the gz tier at 0") {
    OperatorModel m = harmonic_diagonal();
    OperatorModel p1 = perturb(m, {{0, ec(7)}});  // entry 1 -> 7
    CHECK(classify(p1, ec(0)).tier == Tier::gz_invertible);

    OperatorModel p2 = perturb(m, {{0, ec(0)}});  // entry 1 -> 0
    CHECK(classify(p2, ec(0)).tier == Tier::gz_invertible);
    CHECK(point_data(p2, ec(0)).alpha == ExtendedNat::of(1));

    // finite rank CAN change lower tiers
    OperatorModel fin = finite_diag({2});
    OperatorModel fin_p = perturb(fin, {{0, ec(0)}});
    CHECK(classify(fin, ec(0)).tier == Tier::invertible);
    CHECK(classify(fin_p, ec(0)).tier == Tier::drazin);
}

TEST_CASE("perturbation point data accounts for edits") {
    OperatorModel m = harmonic_diagonal();
    OperatorModel p = perturb(m, {{0, ecq(1, 2)}});  // entry 1 -> 1/2: multiplicity 2
    CHECK(point_data(p, ecq(1, 2)).alpha == ExtendedNat::of(2));
    CHECK(point_data(p, ec(1)).in_spectrum == false);
}

TEST_CASE("truncate: diagonal leading entries") {
    ComplexMatrix t = truncate(harmonic_diagonal(), 3);
    CHECK(t(0, 0) == Cd(1.0));
    CHECK(t(1, 1) == Cd(0.5));
    CHECK(std::abs(t(2, 2) - Cd(1.0 / 3.0)) < 1e-15);
}

TEST_CASE("truncate: shifts compress to their bands") {
    ComplexMatrix l = truncate(left_shift(), 3);
    CHECK(l(0, 1) == Cd(1.0));
    CHECK(l(1, 2) == Cd(1.0));
    CHECK(l(1, 0) == Cd(0.0));

    ComplexMatrix r = truncate(right_shift(), 3);
    CHECK(r(1, 0) == Cd(1.0));
    CHECK(r(2, 1) == Cd(1.0));

    ComplexMatrix l3 = truncate(make_power(left_shift(), 3), 4);
    CHECK(l3(0, 3) == Cd(1.0));
    CHECK(l3.norm() == doctest::Approx(1.0));
}

TEST_CASE("truncate commutes with the diagonal gz inverse entrywise") {
    OperatorModel m = harmonic_diagonal();
    SpectralSetSelection sigma;
    sigma.selected_clusters = {{0, ClusterMode::whole}};
    sigma.boundary_moves = {{0, 1}, {0, 2}};
    auto [inv, cert] = gz_inverse_diagonal(m, sigma);

    // Compare the sets of diagonal entries: truncate(S) vs the entrywise rule
    // applied to truncate(T).
    auto t_entries = diagonal_entries(m, 6);
    std::vector<Cd> expected;
    for (const auto& t : t_entries) {
        bool selected = !(t == ec(1) || t == ecq(1, 2));
        expected.push_back(selected ? Cd(0) : (ExactComplex(1, 0) / t).to_complex());
    }
    auto s_entries = diagonal_entries(inv, 6);
    std::vector<Cd> got;
    for (const auto& s : s_entries) got.push_back(s.to_complex());
    auto key = [](Cd a, Cd b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(expected.begin(), expected.end(), key);
    std::sort(got.begin(), got.end(), key);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(expected[i] - got[i]) < 1e-15);
}

TEST_CASE("zeroloid of direct sums matches the summand conjunction") {
    OperatorModel z1 = quasi_nilpotent_shift();
    OperatorModel nz = finite_diag({1});
    CHECK(is_zeroloid(spectrum(make_direct_sum({z1, harmonic_diagonal()})).countable));
    OperatorSpectrum mixed = spectrum(make_direct_sum({quasi_nilpotent_shift(), nz}));
    CHECK((is_zeroloid(mixed.countable) ==
           (is_zeroloid(spectrum(quasi_nilpotent_shift()).countable) &&
            is_zeroloid(spectrum(finite_diag({1})).countable))));
}

TEST_CASE("affine images push through models") {
    OperatorModel m = make_affine(harmonic_diagonal(), ec(2), ec(1));
    CHECK(m.kind == OperatorModel::Kind::diagonal);
    OperatorSpectrum sp = spectrum(m);
    CHECK(sp.countable.contains(ec(3)));   // 2*1 + 1
    CHECK(sp.countable.contains(ec(1)));   // limit image
    CHECK(classify(m, ec(1)).tier == Tier::gz_invertible);

    OperatorModel shifted = make_affine(left_shift(), ec(1), ec(5));
    OperatorSpectrum ssp = spectrum(shifted);
    REQUIRE(ssp.disks.size() == 1);
    CHECK(ssp.disks[0].center == ec(5));
    CHECK(classify(shifted, ec(5)).tier == Tier::none);  // disk center
    CHECK(classify(shifted, ec(0)).tier == Tier::invertible);
}

TEST_CASE("powers of shifted disks are rejected") {
    OperatorModel shifted = make_affine(left_shift(), ec(1), ec(5));
    CHECK_THROWS_AS(make_power(std::move(shifted), 2), Error);
}
