// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gzspec/linalg.hpp"
#include "gzspec/spectrum_model.hpp"

namespace gzspec {

// --------------------------------------------------------------------------
// Structured operator models with exactly computable spectra. This is the
// layer where the Drazin / generalized Drazin / g_z distinctions do not
// collapse (finite matrices are always Drazin at eigenvalues).
// --------------------------------------------------------------------------

struct ExtendedNat {
    bool infinite = false;
    std::size_t value = 0;

    static ExtendedNat inf() { return {true, 0}; }
    static ExtendedNat of(std::size_t v) { return {false, v}; }
    bool finite() const { return !infinite; }
    friend bool operator==(const ExtendedNat& a, const ExtendedNat& b) {
        return a.infinite == b.infinite && (a.infinite || a.value == b.value);
    }
    friend ExtendedNat operator+(const ExtendedNat& a, const ExtendedNat& b) {
        if (a.infinite || b.infinite) return inf();
        return of(a.value + b.value);
    }
};

struct PointData {
    ExtendedNat alpha;
    ExtendedNat beta;
    bool isolated = false;
    bool in_spectrum = false;
};

struct DiagonalPointEntry {
    ExactComplex value;
    std::optional<std::size_t> multiplicity = 1;  // nullopt = infinite
};

struct DiagonalModel {
    std::vector<DiagonalPointEntry> point_entries;
    std::vector<Cluster> cluster_entries;  // every generated member is an entry
};

enum class ShiftDirection { left, right };

struct ConstantWeights {
    Rational value;                // eventual weight c > 0
    std::vector<Rational> prefix;  // finitely many leading weights, all > 0
};

struct NullWeights {
    TailSpec decay;  // must generate positive real offsets (the weights)
};

struct ShiftModel {
    ShiftDirection direction = ShiftDirection::left;
    std::variant<ConstantWeights, NullWeights> weights;

    bool quasi_nilpotent() const { return std::holds_alternative<NullWeights>(weights); }
    Rational eventual_value() const;  // c for constant weights, 0 for null
    Rational weight(unsigned long k) const;
};

struct OperatorModel {
    enum class Kind { finite_matrix, diagonal, shift, direct_sum, affine, power, perturbation };

    Kind kind = Kind::finite_matrix;
    ComplexMatrix matrix;                    // finite_matrix
    DiagonalModel diagonal;                  // diagonal, perturbation base
    ShiftModel shift;                        // shift
    std::vector<OperatorModel> children;     // direct_sum (all), affine/power (one)
    ExactComplex affine_a;                   // affine: a T + b
    ExactComplex affine_b;
    unsigned long power_n = 1;               // power: T^n (base is shift-like)
    std::vector<std::pair<std::size_t, ExactComplex>> perturbation;  // index -> new value
};

OperatorModel make_matrix_model(ComplexMatrix a);
OperatorModel make_diagonal_model(DiagonalModel d);
OperatorModel make_shift_model(ShiftModel s);
OperatorModel make_direct_sum(std::vector<OperatorModel> summands);
// Normalizes structurally: affine of diagonal/matrix/direct-sum pushes inward;
// only shift-like nodes keep wrappers.
OperatorModel make_affine(OperatorModel base, ExactComplex a, ExactComplex b);
OperatorModel make_power(OperatorModel base, unsigned long n);
OperatorModel make_perturbation(OperatorModel diagonal_base,
                                std::vector<std::pair<std::size_t, ExactComplex>> support);

struct Disk {
    ExactComplex center;
    Rational radius_sq;  // > 0
};

struct OperatorSpectrum {
    SpectrumModel countable;
    std::vector<Disk> disks;

    bool pure_countable() const { return disks.empty(); }
};

OperatorSpectrum spectrum(const OperatorModel& m);

// Exact kernel/cokernel data at an exactly representable point.
PointData point_data(const OperatorModel& m, const ExactComplex& lambda);

// Fredholm index alpha - beta; requires a semi-Fredholm point (finite data
// and closed range).
long index_at(const OperatorModel& m, const ExactComplex& lambda);

struct Classification {
    enum class Tier { invertible, drazin, generalized_drazin, gz_invertible, none };
    Tier tier = Tier::invertible;
    bool browder = false;  // finite alpha and beta refinement of the drazin tier
    bool in_spectrum = false;
    bool in_acc = false;
    bool in_acc_acc = false;
    bool left_invertible = false;   // alpha = 0 with closed range
    bool right_invertible = false;  // beta = 0 with closed range
};
const char* tier_name(Classification::Tier t);

Classification classify(const OperatorModel& m, const ExactComplex& lambda);

OperatorModel adjoint_model(const OperatorModel& m);

struct DiagonalGzCertificate {
    bool commutes = true;         // TS = ST, exact (diagonal algebra)
    bool inner_identity = true;   // STS = S, exact entrywise
    bool core_zeroloid = false;   // acc{-d : d in sigma} subset {0}
    bool inverse_regularity = true;  // p(S) = q(S) = dis(S) <= 1, diagonal sense
    bool spectrum_matches = false;   // spectrum(S) = reciprocal image
    SpectrumModel core_entries;      // entry model of T^2 S - T
    SpectrumModel expected_spectrum; // reciprocal_gz_image(spectrum(T), sigma)
};

// Exact g_z inverse of a diagonal model: entries 1/d off sigma, 0 on sigma.
std::pair<OperatorModel, DiagonalGzCertificate> gz_inverse_diagonal(
    const OperatorModel& m, const SpectralSetSelection& sigma);

// Finite-support commuting perturbation. Asserts the g_z tier at 0 is
// unchanged (it is a theorem; violation means an internal fault).
OperatorModel perturb(const OperatorModel& m,
                      std::vector<std::pair<std::size_t, ExactComplex>> support);

// N x N compression. Diagonal models: leading canonical entries; shifts:
// leading block. Only used to cross-check algebraic identities numerically.
ComplexMatrix truncate(const OperatorModel& m, Eigen::Index n);

// Canonical diagonal entry enumeration (finite-multiplicity points first,
// then round robin over the infinite sources), after perturbation edits.
std::vector<ExactComplex> diagonal_entries(const OperatorModel& m, std::size_t count);

// Entry positions below `count` whose spectrum edit is representable
// (point entries, depth-1 atoms, child limits; depth-2 leaves are not).
std::vector<std::size_t> editable_entry_indices(const OperatorModel& m, std::size_t count);

}  // namespace gzspec
