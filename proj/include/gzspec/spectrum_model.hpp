// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "gzspec/rational.hpp"

namespace gzspec {

// ---------------------------------------------------------------------------
// Tails: closed-form generators of offset sequences o_n -> 0, n >= 1.
// ---------------------------------------------------------------------------

struct GeometricTail {
    ExactComplex base;  // nonzero
    Rational ratio;     // 0 < |ratio| < 1
};

struct PowerTail {
    ExactComplex scale;      // nonzero
    unsigned long exponent;  // integer >= 1 (schema field is rational; integers only)
};

using TailSpec = std::variant<GeometricTail, PowerTail>;

ExactComplex tail_offset(const TailSpec& tail, unsigned long n);
Rational tail_offset_abs2(const TailSpec& tail, unsigned long n);  // strictly decreasing in n
TailSpec conjugate_tail(const TailSpec& tail);
void validate_tail(const TailSpec& tail);

// ---------------------------------------------------------------------------
// Pointwise maps composed onto a generated set. Image operations keep the
// original generator and post-compose; the closed-form tail is not preserved.
// ---------------------------------------------------------------------------

struct AffineMap {
    ExactComplex a;  // nonzero
    ExactComplex b;
};
struct PowerMap {
    unsigned long n;  // >= 1
};
struct ReciprocalMap {};

using MapOp = std::variant<AffineMap, PowerMap, ReciprocalMap>;

struct Transform {
    std::vector<MapOp> ops;

    bool identity() const { return ops.empty(); }
    ExactComplex apply(const ExactComplex& z) const;

    // Certified squared Lipschitz bound over the closed disk
    // |z - center|^2 <= radius2. nullopt when some reciprocal stage's input
    // disk touches 0 (transform undefined there).
    std::optional<Rational> lip2_on_disk(const ExactComplex& center, const Rational& radius2) const;

    void push_affine(const ExactComplex& a, const ExactComplex& b);
    void push_power(unsigned long n);
    void push_reciprocal();
};

Transform conjugate_transform(const Transform& t);

// ---------------------------------------------------------------------------
// Cluster: one accumulation site. Depth 1: the atoms limit + o_n are the
// isolated terms. Depth 2 (child_tail set): atom n is itself the limit of a
// child cluster whose terms are atom(n) + o_n * child_offset(m); the child
// offsets inherit the parent offset as a scale so children shrink toward
// their limits. Total accumulation depth never exceeds 2.
// ---------------------------------------------------------------------------

struct Cluster {
    ExactComplex limit;  // raw (pre-transform) limit
    TailSpec tail;
    std::size_t removed_prefix = 0;
    std::vector<unsigned long> excluded;  // finite extra raw indices dropped, sorted
    std::optional<TailSpec> child_tail;
    Transform transform;

    bool depth2() const { return child_tail.has_value(); }
    bool active(unsigned long n) const;
    unsigned long first_active() const;
    unsigned long next_active(unsigned long n) const;

    ExactComplex raw_atom(unsigned long n) const;
    ExactComplex atom(unsigned long n) const;
    ExactComplex raw_leaf(unsigned long n, unsigned long m) const;
    ExactComplex leaf(unsigned long n, unsigned long m) const;
    ExactComplex limit_value() const;

    // Exact membership in the represented closed set.
    bool contains(const ExactComplex& v) const;
    // Multiplicity of v among generated entries (depth-1 atoms, or depth-2
    // child limits and leaves; the top limit is not an entry).
    std::size_t count_entries(const ExactComplex& v) const;
    // True iff v is one of the isolated members (depth-1 atom / depth-2 leaf).
    bool contains_isolated(const ExactComplex& v) const;
    // True iff v is an accumulation point of the cluster set.
    bool contains_acc(const ExactComplex& v) const;
    std::optional<unsigned long> find_atom(const ExactComplex& v) const;

    // Entries in canonical order: depth-1 atoms ascending; depth-2 shells
    // (child limit k, then leaves (n, m) with n + m = k + 1).
    std::vector<ExactComplex> enumerate_entries(std::size_t count) const;
    std::vector<ExactComplex> enumerate_isolated(std::size_t count) const;

    // The moved-out child k of a depth-2 cluster as a standalone depth-1 cluster.
    Cluster detach_child(unsigned long k) const;
};

Cluster make_cluster(ExactComplex limit, TailSpec tail, std::size_t removed_prefix = 0,
                     std::vector<unsigned long> excluded = {},
                     std::optional<TailSpec> child_tail = std::nullopt, Transform transform = {});

Cluster conjugate_cluster(const Cluster& c);

// ---------------------------------------------------------------------------
// SpectrumModel: a closed bounded countable subset of C with accumulation
// depth <= 2, given as isolated candidate points plus clusters.
// ---------------------------------------------------------------------------

struct SpectrumModel {
    std::vector<ExactComplex> points;
    std::vector<Cluster> clusters;

    bool empty() const { return points.empty() && clusters.empty(); }
    bool contains(const ExactComplex& v) const;
};

// Normalizing constructor: deduplicates points, absorbs points that coincide
// with cluster members, excises depth-1 atoms hit by another cluster's limit.
// A limit landing on a depth-2 leaf is unrepresentable -> depth-overflow.
SpectrumModel make_model(std::vector<ExactComplex> points, std::vector<Cluster> clusters);

SpectrumModel acc(const SpectrumModel& s);
std::vector<ExactComplex> acc_acc(const SpectrumModel& s);

struct IsolatedPart {
    std::vector<ExactComplex> points;
    std::vector<Cluster> term_generators;
    // acc(S); generated terms landing on it are filtered out when enumerating
    // (a term of one cluster may coincide with an accumulation point of
    // another, e.g. an atom of {1/n} against the child limits of a depth-2
    // cluster over the same sites).
    SpectrumModel accumulation;

    std::vector<ExactComplex> enumerate(std::size_t per_generator) const;
    bool contains(const ExactComplex& v) const;
};
IsolatedPart iso(const SpectrumModel& s);

enum class SpectralClass { Invertible, GeneralizedDrazin, GzInvertible, NotGzInvertible };
const char* spectral_class_name(SpectralClass c);
SpectralClass classify_zero(const SpectrumModel& s);

bool is_zeroloid(const SpectrumModel& s);

// ---------------------------------------------------------------------------
// Spectral-set selections: sigma and its complement must both be closed.
// ---------------------------------------------------------------------------

enum class ClusterMode { whole, limit_only };

struct ClusterSelection {
    std::size_t index;
    ClusterMode mode = ClusterMode::whole;
};

// Depth-1 cluster: `index` is a raw atom index; depth-2: a raw child index
// (the child moves wholesale, limit and terms together).
struct BoundaryMove {
    std::size_t cluster;
    unsigned long index;
};

struct SpectralSetSelection {
    std::vector<std::size_t> selected_points;
    std::vector<ClusterSelection> selected_clusters;
    std::vector<BoundaryMove> boundary_moves;

    static constexpr std::size_t max_boundary_moves = 64;
};

// Throws malformed-selection on bad indices; returns closedness of both sides.
bool is_spectral_set(const SpectrumModel& s, const SpectralSetSelection& sel);

struct SpectralSplit {
    SpectrumModel selected;
    SpectrumModel complement;
};

// Requires is_spectral_set(s, sel).
SpectralSplit split_selection(const SpectrumModel& s, const SpectralSetSelection& sel);

// ---------------------------------------------------------------------------
// Image operations.
// ---------------------------------------------------------------------------

// Per-cluster images (closed form when available, composed map otherwise).
Cluster cluster_affine(const Cluster& c, const ExactComplex& a, const ExactComplex& b);
Cluster cluster_power(const Cluster& c, unsigned long n);
// 1/z image of one cluster whose closed set avoids 0; leading terms too close
// to 0 for the certified bound are excised and emitted as points.
void reciprocal_cluster(const Cluster& c, std::vector<ExactComplex>& points_out,
                        std::vector<Cluster>& clusters_out);

SpectrumModel affine_image(const SpectrumModel& s, const ExactComplex& a, const ExactComplex& b);
SpectrumModel power_image(const SpectrumModel& s, unsigned long n);

// {0} u { 1/z : z in s \ sigma }; 0 appears iff the selected side is nonempty.
// Preconditions: valid spectral set, 0 not in s \ sigma.
SpectrumModel reciprocal_gz_image(const SpectrumModel& s, const SpectralSetSelection& sel);

SpectrumModel set_union(const SpectrumModel& a, const SpectrumModel& b);

}  // namespace gzspec
