// SPDX-License-Identifier: Apache-2.0
#include "gzspec/operator_model.hpp"

#include <algorithm>
#include <map>

namespace gzspec {

// --------------------------------------------------------------------------
// Shift weights
// --------------------------------------------------------------------------

Rational ShiftModel::eventual_value() const {
    if (const auto* c = std::get_if<ConstantWeights>(&weights)) return c->value;
    return Rational(0);
}

Rational ShiftModel::weight(unsigned long k) const {
    if (const auto* c = std::get_if<ConstantWeights>(&weights)) {
        if (k >= 1 && k <= c->prefix.size()) return c->prefix[k - 1];
        return c->value;
    }
    const auto& n = std::get<NullWeights>(weights);
    ExactComplex o = tail_offset(n.decay, k);
    return o.re;
}

// --------------------------------------------------------------------------
// Factories
// --------------------------------------------------------------------------

OperatorModel make_matrix_model(ComplexMatrix a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        raise(ErrorCode::invalid_argument, "finite matrix model must be square and nonempty");
    check_finite(a);
    OperatorModel m;
    m.kind = OperatorModel::Kind::finite_matrix;
    m.matrix = std::move(a);
    return m;
}

OperatorModel make_diagonal_model(DiagonalModel d) {
    for (const auto& e : d.point_entries) {
        if (e.multiplicity && *e.multiplicity == 0)
            raise(ErrorCode::invalid_argument, "diagonal point entry with zero multiplicity");
    }
    for (const auto& c : d.cluster_entries) {
        // re-validate through the constructor
        make_cluster(c.limit, c.tail, c.removed_prefix, c.excluded, c.child_tail, c.transform);
    }
    if (d.point_entries.empty() && d.cluster_entries.empty())
        raise(ErrorCode::invalid_argument, "diagonal model needs at least one entry");
    OperatorModel m;
    m.kind = OperatorModel::Kind::diagonal;
    m.diagonal = std::move(d);
    return m;
}

OperatorModel make_shift_model(ShiftModel s) {
    if (const auto* c = std::get_if<ConstantWeights>(&s.weights)) {
        if (sgn(c->value) <= 0)
            raise(ErrorCode::invalid_argument, "shift weights must be positive");
        for (const auto& w : c->prefix)
            if (sgn(w) <= 0) raise(ErrorCode::invalid_argument, "shift weights must be positive");
    } else {
        const auto& n = std::get<NullWeights>(s.weights);
        validate_tail(n.decay);
        for (unsigned long k = 1; k <= 4; ++k) {
            ExactComplex o = tail_offset(n.decay, k);
            if (!o.is_real() || sgn(o.re) <= 0)
                raise(ErrorCode::invalid_argument, "null weight decay must be positive real");
        }
    }
    OperatorModel m;
    m.kind = OperatorModel::Kind::shift;
    m.shift = std::move(s);
    return m;
}

OperatorModel make_direct_sum(std::vector<OperatorModel> summands) {
    if (summands.empty()) raise(ErrorCode::invalid_argument, "direct sum needs summands");
    if (summands.size() == 1) return std::move(summands.front());
    OperatorModel m;
    m.kind = OperatorModel::Kind::direct_sum;
    m.children = std::move(summands);
    return m;
}

OperatorModel make_affine(OperatorModel base, ExactComplex a, ExactComplex b) {
    if (a.is_zero())
        raise(ErrorCode::invalid_argument, "affine model needs a != 0 (scalar operators are out of scope)");
    switch (base.kind) {
        case OperatorModel::Kind::finite_matrix: {
            ComplexMatrix out = a.to_complex() * base.matrix +
                                b.to_complex() * ComplexMatrix::Identity(base.matrix.rows(),
                                                                         base.matrix.cols());
            return make_matrix_model(std::move(out));
        }
        case OperatorModel::Kind::diagonal: {
            DiagonalModel d;
            for (const auto& e : base.diagonal.point_entries)
                d.point_entries.push_back({a * e.value + b, e.multiplicity});
            for (const auto& c : base.diagonal.cluster_entries)
                d.cluster_entries.push_back(cluster_affine(c, a, b));
            return make_diagonal_model(std::move(d));
        }
        case OperatorModel::Kind::direct_sum: {
            std::vector<OperatorModel> mapped;
            for (auto& child : base.children) mapped.push_back(make_affine(child, a, b));
            return make_direct_sum(std::move(mapped));
        }
        case OperatorModel::Kind::affine: {
            ExactComplex a2 = a * base.affine_a;
            ExactComplex b2 = a * base.affine_b + b;
            OperatorModel inner = std::move(base.children.front());
            return make_affine(std::move(inner), std::move(a2), std::move(b2));
        }
        case OperatorModel::Kind::perturbation: {
            std::vector<std::pair<std::size_t, ExactComplex>> support;
            for (const auto& [idx, v] : base.perturbation) support.push_back({idx, a * v + b});
            OperatorModel mapped_base = make_affine(
                make_diagonal_model(base.diagonal), a, b);
            return make_perturbation(std::move(mapped_base), std::move(support));
        }
        default: {
            OperatorModel m;
            m.kind = OperatorModel::Kind::affine;
            m.children.push_back(std::move(base));
            m.affine_a = std::move(a);
            m.affine_b = std::move(b);
            return m;
        }
    }
}

OperatorModel make_power(OperatorModel base, unsigned long n) {
    if (n == 0) raise(ErrorCode::invalid_argument, "operator power needs n >= 1");
    if (n == 1) return base;
    switch (base.kind) {
        case OperatorModel::Kind::finite_matrix:
            return make_matrix_model(matrix_power(base.matrix, static_cast<Eigen::Index>(n)));
        case OperatorModel::Kind::diagonal: {
            DiagonalModel d;
            for (const auto& e : base.diagonal.point_entries)
                d.point_entries.push_back({exact_complex_pow(e.value, n), e.multiplicity});
            for (const auto& c : base.diagonal.cluster_entries)
                d.cluster_entries.push_back(cluster_power(c, n));
            return make_diagonal_model(std::move(d));
        }
        case OperatorModel::Kind::direct_sum: {
            std::vector<OperatorModel> mapped;
            for (auto& child : base.children) mapped.push_back(make_power(child, n));
            return make_direct_sum(std::move(mapped));
        }
        case OperatorModel::Kind::power: {
            unsigned long total = base.power_n * n;
            OperatorModel inner = std::move(base.children.front());
            return make_power(std::move(inner), total);
        }
        case OperatorModel::Kind::affine: {
            if (!base.affine_b.is_zero())
                raise(ErrorCode::unsupported_spectral_shape,
                      "powers of shifted disk spectra are not disks");
            ExactComplex an = exact_complex_pow(base.affine_a, n);
            OperatorModel inner = std::move(base.children.front());
            return make_affine(make_power(std::move(inner), n), std::move(an), ExactComplex());
        }
        case OperatorModel::Kind::perturbation: {
            std::vector<std::pair<std::size_t, ExactComplex>> support;
            for (const auto& [idx, v] : base.perturbation)
                support.push_back({idx, exact_complex_pow(v, n)});
            return make_perturbation(make_power(make_diagonal_model(base.diagonal), n),
                                     std::move(support));
        }
        case OperatorModel::Kind::shift: {
            OperatorModel m;
            m.kind = OperatorModel::Kind::power;
            m.children.push_back(std::move(base));
            m.power_n = n;
            return m;
        }
    }
    raise(ErrorCode::internal, "unhandled model kind in make_power");
}

// --------------------------------------------------------------------------
// Canonical diagonal entry enumeration
// --------------------------------------------------------------------------

namespace {

struct EntrySource {
    enum class Kind { point, atom, leaf } kind = Kind::point;
    std::size_t point_index = 0;
    std::size_t cluster_index = 0;
    unsigned long n = 0;  // main-tail raw index
    unsigned long m = 0;  // child index for leaves
};

struct SourcedEntry {
    ExactComplex value;
    EntrySource source;
};

// Stream of one cluster's entries in shell order, with sources.
class ClusterEntryStream {
  public:
    ClusterEntryStream(const Cluster& c, std::size_t cluster_index)
        : cluster_(&c), index_(cluster_index), next_(c.first_active()) {}

    SourcedEntry next() {
        const Cluster& c = *cluster_;
        if (!c.depth2()) {
            unsigned long n = next_;
            next_ = c.next_active(next_);
            return {c.atom(n), {EntrySource::Kind::atom, 0, index_, n, 0}};
        }
        if (queue_pos_ < queue_.size()) return queue_[queue_pos_++];
        // open the next shell
        actives_.push_back(next_);
        next_ = c.next_active(next_);
        queue_.clear();
        queue_pos_ = 0;
        unsigned long a_s = actives_.back();
        queue_.push_back({c.atom(a_s), {EntrySource::Kind::atom, 0, index_, a_s, 0}});
        for (std::size_t i = 0; i < actives_.size(); ++i) {
            unsigned long m = static_cast<unsigned long>(actives_.size() - i);
            queue_.push_back(
                {c.leaf(actives_[i], m), {EntrySource::Kind::leaf, 0, index_, actives_[i], m}});
        }
        return queue_[queue_pos_++];
    }

  private:
    const Cluster* cluster_;
    std::size_t index_;
    unsigned long next_;
    std::vector<unsigned long> actives_;
    std::vector<SourcedEntry> queue_;
    std::size_t queue_pos_ = 0;
};

// Finite-multiplicity point entries first (declaration order), then round
// robin over the infinite sources (infinite-multiplicity points, clusters).
std::vector<SourcedEntry> enumerate_with_sources(const DiagonalModel& d, std::size_t count) {
    std::vector<SourcedEntry> out;
    out.reserve(count);
    for (std::size_t i = 0; i < d.point_entries.size() && out.size() < count; ++i) {
        const auto& e = d.point_entries[i];
        if (!e.multiplicity) continue;
        for (std::size_t k = 0; k < *e.multiplicity && out.size() < count; ++k)
            out.push_back({e.value, {EntrySource::Kind::point, i, 0, 0, 0}});
    }
    std::vector<std::size_t> infinite_points;
    for (std::size_t i = 0; i < d.point_entries.size(); ++i)
        if (!d.point_entries[i].multiplicity) infinite_points.push_back(i);
    std::vector<ClusterEntryStream> streams;
    for (std::size_t i = 0; i < d.cluster_entries.size(); ++i)
        streams.emplace_back(d.cluster_entries[i], i);

    std::size_t n_sources = infinite_points.size() + streams.size();
    if (n_sources == 0) return out;
    for (std::size_t t = 0; out.size() < count; ++t) {
        std::size_t s = t % n_sources;
        if (s < infinite_points.size()) {
            std::size_t i = infinite_points[s];
            out.push_back({d.point_entries[i].value, {EntrySource::Kind::point, i, 0, 0, 0}});
        } else {
            out.push_back(streams[s - infinite_points.size()].next());
        }
    }
    return out;
}

bool diagonal_is_finite(const DiagonalModel& d) {
    if (!d.cluster_entries.empty()) return false;
    for (const auto& e : d.point_entries)
        if (!e.multiplicity) return false;
    return true;
}

std::size_t diagonal_total_entries(const DiagonalModel& d) {
    std::size_t total = 0;
    for (const auto& e : d.point_entries) total += *e.multiplicity;
    return total;
}

const DiagonalModel& require_diagonal(const OperatorModel& m, const char* what) {
    if (m.kind != OperatorModel::Kind::diagonal &&
        m.kind != OperatorModel::Kind::perturbation)
        raise(ErrorCode::invalid_argument, std::string(what) + " needs a diagonal model");
    return m.diagonal;
}

}  // namespace

std::vector<ExactComplex> diagonal_entries(const OperatorModel& m, std::size_t count) {
    const DiagonalModel& d = require_diagonal(m, "diagonal_entries");
    if (diagonal_is_finite(d)) count = std::min(count, diagonal_total_entries(d));
    auto sourced = enumerate_with_sources(d, count);
    std::vector<ExactComplex> out;
    out.reserve(sourced.size());
    for (auto& e : sourced) out.push_back(std::move(e.value));
    if (m.kind == OperatorModel::Kind::perturbation) {
        for (const auto& [idx, v] : m.perturbation)
            if (idx < out.size()) out[idx] = v;
    }
    return out;
}

std::vector<std::size_t> editable_entry_indices(const OperatorModel& m, std::size_t count) {
    const DiagonalModel& d = require_diagonal(m, "editable_entry_indices");
    if (diagonal_is_finite(d)) count = std::min(count, diagonal_total_entries(d));
    auto sourced = enumerate_with_sources(d, count);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sourced.size(); ++i)
        if (sourced[i].source.kind != EntrySource::Kind::leaf) out.push_back(i);
    return out;
}

// --------------------------------------------------------------------------
// Spectrum
// --------------------------------------------------------------------------

namespace {

SpectrumModel diagonal_spectrum_model(const DiagonalModel& d) {
    std::vector<ExactComplex> pts;
    for (const auto& e : d.point_entries) pts.push_back(e.value);
    return make_model(std::move(pts), d.cluster_entries);
}

SpectrumModel perturbed_spectrum_model(const OperatorModel& m) {
    const DiagonalModel& d = m.diagonal;
    // Count removed occurrences per point entry; excise edited depth-1 atoms.
    std::size_t max_idx = 0;
    for (const auto& [idx, v] : m.perturbation) max_idx = std::max(max_idx, idx);
    auto sourced = enumerate_with_sources(d, max_idx + 1);

    std::map<std::size_t, std::size_t> removed_points;
    std::vector<std::vector<unsigned long>> excised(d.cluster_entries.size());
    std::vector<ExactComplex> added;
    for (const auto& [idx, v] : m.perturbation) {
        if (idx >= sourced.size())
            raise(ErrorCode::invalid_argument, "perturbation index beyond the entry stream");
        const EntrySource& src = sourced[idx].source;
        switch (src.kind) {
            case EntrySource::Kind::point: removed_points[src.point_index] += 1; break;
            case EntrySource::Kind::atom:
                if (d.cluster_entries[src.cluster_index].depth2()) {
                    // a child limit stays in the closure; no structural edit
                } else {
                    excised[src.cluster_index].push_back(src.n);
                }
                break;
            case EntrySource::Kind::leaf:
                raise(ErrorCode::unsupported_spectral_shape,
                      "perturbation of depth-2 generated entries is unsupported");
        }
        added.push_back(v);
    }

    std::vector<ExactComplex> pts;
    for (std::size_t i = 0; i < d.point_entries.size(); ++i) {
        const auto& e = d.point_entries[i];
        std::size_t removed = removed_points.count(i) ? removed_points[i] : 0;
        if (!e.multiplicity || *e.multiplicity > removed) pts.push_back(e.value);
    }
    pts.insert(pts.end(), added.begin(), added.end());
    std::vector<Cluster> cls;
    for (std::size_t i = 0; i < d.cluster_entries.size(); ++i) {
        const Cluster& c = d.cluster_entries[i];
        if (excised[i].empty()) {
            cls.push_back(c);
        } else {
            auto excl = c.excluded;
            excl.insert(excl.end(), excised[i].begin(), excised[i].end());
            cls.push_back(make_cluster(c.limit, c.tail, c.removed_prefix, std::move(excl),
                                       c.child_tail, c.transform));
        }
    }
    return make_model(std::move(pts), std::move(cls));
}

Rational disk_radius_sq(const ShiftModel& s, unsigned long power) {
    Rational c = s.eventual_value();
    return pow_rational(c * c, power);
}

}  // namespace

OperatorSpectrum spectrum(const OperatorModel& m) {
    switch (m.kind) {
        case OperatorModel::Kind::finite_matrix: {
            std::vector<ExactComplex> pts;
            for (const auto& lambda : eigenvalues(m.matrix))
                pts.push_back({rational_from_double(lambda.real()),
                               rational_from_double(lambda.imag())});
            return {make_model(std::move(pts), {}), {}};
        }
        case OperatorModel::Kind::diagonal:
            return {diagonal_spectrum_model(m.diagonal), {}};
        case OperatorModel::Kind::perturbation:
            return {perturbed_spectrum_model(m), {}};
        case OperatorModel::Kind::shift: {
            if (m.shift.quasi_nilpotent()) return {make_model({ExactComplex()}, {}), {}};
            return {{}, {Disk{ExactComplex(), disk_radius_sq(m.shift, 1)}}};
        }
        case OperatorModel::Kind::power: {
            const OperatorModel& base = m.children.front();
            if (base.shift.quasi_nilpotent()) return {make_model({ExactComplex()}, {}), {}};
            return {{}, {Disk{ExactComplex(), disk_radius_sq(base.shift, m.power_n)}}};
        }
        case OperatorModel::Kind::affine: {
            OperatorSpectrum inner = spectrum(m.children.front());
            OperatorSpectrum out;
            out.countable = affine_image(inner.countable, m.affine_a, m.affine_b);
            Rational a2 = m.affine_a.abs2();
            for (const auto& disk : inner.disks)
                out.disks.push_back(
                    {m.affine_a * disk.center + m.affine_b, a2 * disk.radius_sq});
            return out;
        }
        case OperatorModel::Kind::direct_sum: {
            OperatorSpectrum out;
            bool first = true;
            for (const auto& child : m.children) {
                OperatorSpectrum cs = spectrum(child);
                if (first) {
                    out.countable = std::move(cs.countable);
                    first = false;
                } else {
                    out.countable = set_union(out.countable, cs.countable);
                }
                out.disks.insert(out.disks.end(), cs.disks.begin(), cs.disks.end());
            }
            return out;
        }
    }
    raise(ErrorCode::internal, "unhandled model kind in spectrum");
}

// --------------------------------------------------------------------------
// Pointwise data
// --------------------------------------------------------------------------

namespace {

struct PointInfo {
    ExtendedNat alpha;
    ExtendedNat beta;
    bool in_spectrum = false;
    bool in_acc = false;
    bool in_acc_acc = false;
    bool range_closed = true;
    bool ascent_finite = true;
    bool descent_finite = true;
    bool unsupported = false;
};

PointInfo point_info(const OperatorModel& m, const ExactComplex& lambda);

PointInfo diagonal_point_info(const SpectrumModel& sp, const ExtendedNat& mult,
                              const ExactComplex& lambda) {
    PointInfo info;
    info.alpha = mult;
    info.beta = mult;
    SpectrumModel accumulation = acc(sp);
    info.in_acc = accumulation.contains(lambda);
    info.in_spectrum = (mult.infinite || mult.value > 0) || sp.contains(lambda);
    for (const auto& v : acc_acc(sp))
        if (v == lambda) info.in_acc_acc = true;
    info.range_closed = !info.in_acc;
    return info;
}

ExtendedNat diagonal_multiplicity(const DiagonalModel& d, const ExactComplex& lambda) {
    std::size_t finite = 0;
    for (const auto& e : d.point_entries) {
        if (e.value == lambda) {
            if (!e.multiplicity) return ExtendedNat::inf();
            finite += *e.multiplicity;
        }
    }
    for (const auto& c : d.cluster_entries) finite += c.count_entries(lambda);
    return ExtendedNat::of(finite);
}

// Position of lambda relative to the closed disk of radius^2 r2 about 0.
enum class DiskPosition { outside, boundary, inside_center, inside_other };

DiskPosition disk_position(const ExactComplex& lambda, const Rational& r2) {
    Rational q = lambda.abs2();
    if (q > r2) return DiskPosition::outside;
    if (q == r2) return DiskPosition::boundary;
    return lambda.is_zero() ? DiskPosition::inside_center : DiskPosition::inside_other;
}

PointInfo shift_point_info(const ShiftModel& s, unsigned long power, const ExactComplex& lambda) {
    PointInfo info;
    const bool left = s.direction == ShiftDirection::left;
    if (s.quasi_nilpotent()) {
        if (!lambda.is_zero()) return info;  // resolvent point
        info.in_spectrum = true;
        info.range_closed = false;
        if (left) {
            info.alpha = ExtendedNat::of(power);
            info.beta = ExtendedNat::inf();
            info.ascent_finite = false;
        } else {
            info.alpha = ExtendedNat::of(0);
            info.beta = ExtendedNat::inf();
            info.descent_finite = false;
        }
        return info;
    }
    switch (disk_position(lambda, disk_radius_sq(s, power))) {
        case DiskPosition::outside:
            return info;
        case DiskPosition::boundary:
            info.in_spectrum = info.in_acc = info.in_acc_acc = true;
            info.alpha = ExtendedNat::of(0);
            info.beta = ExtendedNat::inf();
            info.range_closed = false;
            return info;
        case DiskPosition::inside_center:
            info.in_spectrum = info.in_acc = info.in_acc_acc = true;
            if (left) {
                info.alpha = ExtendedNat::of(power);
                info.beta = ExtendedNat::of(0);
                info.ascent_finite = false;
            } else {
                info.alpha = ExtendedNat::of(0);
                info.beta = ExtendedNat::of(power);
                info.descent_finite = false;
            }
            return info;
        case DiskPosition::inside_other:
            info.unsupported = true;
            return info;
    }
    raise(ErrorCode::internal, "unhandled disk position");
}

PointInfo point_info(const OperatorModel& m, const ExactComplex& lambda) {
    switch (m.kind) {
        case OperatorModel::Kind::finite_matrix: {
            PointInfo info;
            ToleranceConfig cfg;  // default profile for the numeric boundary
            double scale = std::max(1.0, m.matrix.norm());
            std::complex<double> z = lambda.to_complex();
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& ev : eigenvalues(m.matrix)) dist = std::min(dist, std::abs(ev - z));
            info.in_spectrum = dist <= 1e-9 * scale;
            if (info.in_spectrum) {
                ComplexMatrix shifted =
                    m.matrix - z * ComplexMatrix::Identity(m.matrix.rows(), m.matrix.cols());
                std::size_t a = static_cast<std::size_t>(kernel_basis(shifted, cfg).dim());
                info.alpha = ExtendedNat::of(a);
                info.beta = ExtendedNat::of(a);
            }
            return info;
        }
        case OperatorModel::Kind::diagonal:
            return diagonal_point_info(diagonal_spectrum_model(m.diagonal),
                                       diagonal_multiplicity(m.diagonal, lambda), lambda);
        case OperatorModel::Kind::perturbation: {
            ExtendedNat mult = diagonal_multiplicity(m.diagonal, lambda);
            if (mult.finite()) {
                std::size_t max_idx = 0;
                for (const auto& [idx, v] : m.perturbation) max_idx = std::max(max_idx, idx);
                auto sourced = enumerate_with_sources(m.diagonal, max_idx + 1);
                std::size_t count = mult.value;
                for (const auto& [idx, v] : m.perturbation) {
                    if (idx >= sourced.size())
                        raise(ErrorCode::invalid_argument, "perturbation index beyond stream");
                    if (sourced[idx].value == lambda) --count;
                    if (v == lambda) ++count;
                }
                mult = ExtendedNat::of(count);
            }
            return diagonal_point_info(perturbed_spectrum_model(m), mult, lambda);
        }
        case OperatorModel::Kind::shift:
            return shift_point_info(m.shift, 1, lambda);
        case OperatorModel::Kind::power:
            return shift_point_info(m.children.front().shift, m.power_n, lambda);
        case OperatorModel::Kind::affine: {
            ExactComplex mu = (lambda - m.affine_b) / m.affine_a;
            return point_info(m.children.front(), mu);
        }
        case OperatorModel::Kind::direct_sum: {
            PointInfo info;
            info.alpha = ExtendedNat::of(0);
            info.beta = ExtendedNat::of(0);
            for (const auto& child : m.children) {
                PointInfo ci = point_info(child, lambda);
                info.alpha = info.alpha + ci.alpha;
                info.beta = info.beta + ci.beta;
                info.in_spectrum = info.in_spectrum || ci.in_spectrum;
                info.in_acc = info.in_acc || ci.in_acc;
                info.in_acc_acc = info.in_acc_acc || ci.in_acc_acc;
                info.range_closed = info.range_closed && ci.range_closed;
                info.ascent_finite = info.ascent_finite && ci.ascent_finite;
                info.descent_finite = info.descent_finite && ci.descent_finite;
                info.unsupported = info.unsupported || ci.unsupported;
            }
            return info;
        }
    }
    raise(ErrorCode::internal, "unhandled model kind in point_info");
}

}  // namespace

PointData point_data(const OperatorModel& m, const ExactComplex& lambda) {
    PointInfo info = point_info(m, lambda);
    if (info.unsupported)
        raise(ErrorCode::unsupported_spectral_shape,
              "query lies strictly inside an opaque disk spectrum");
    PointData out;
    out.alpha = info.alpha;
    out.beta = info.beta;
    out.in_spectrum = info.in_spectrum;
    out.isolated = info.in_spectrum && !info.in_acc;
    return out;
}

long index_at(const OperatorModel& m, const ExactComplex& lambda) {
    PointInfo info = point_info(m, lambda);
    if (info.unsupported)
        raise(ErrorCode::unsupported_spectral_shape,
              "query lies strictly inside an opaque disk spectrum");
    if (!info.range_closed)
        raise(ErrorCode::not_semi_fredholm, "range is not closed at this point");
    if (info.alpha.infinite && info.beta.infinite)
        raise(ErrorCode::not_semi_fredholm, "kernel and cokernel are both infinite");
    if (info.alpha.infinite || info.beta.infinite)
        raise(ErrorCode::not_semi_fredholm, "index is infinite");
    return static_cast<long>(info.alpha.value) - static_cast<long>(info.beta.value);
}

const char* tier_name(Classification::Tier t) {
    switch (t) {
        case Classification::Tier::invertible: return "invertible";
        case Classification::Tier::drazin: return "drazin";
        case Classification::Tier::generalized_drazin: return "generalized_drazin";
        case Classification::Tier::gz_invertible: return "gz_invertible";
        case Classification::Tier::none: return "none";
    }
    return "unknown";
}

Classification classify(const OperatorModel& m, const ExactComplex& lambda) {
    PointInfo info = point_info(m, lambda);
    if (info.unsupported)
        raise(ErrorCode::unsupported_spectral_shape,
              "classification inside an opaque disk spectrum is supported only at the "
              "boundary and center");
    Classification c;
    c.in_spectrum = info.in_spectrum;
    c.in_acc = info.in_acc;
    c.in_acc_acc = info.in_acc_acc;
    if (!info.in_spectrum) {
        c.tier = Classification::Tier::invertible;
        c.browder = true;
        c.left_invertible = c.right_invertible = true;
        return c;
    }
    c.left_invertible = info.range_closed && info.alpha == ExtendedNat::of(0);
    c.right_invertible = info.range_closed && info.beta == ExtendedNat::of(0);
    if (!info.in_acc) {
        if (info.ascent_finite && info.descent_finite) {
            c.tier = Classification::Tier::drazin;
            c.browder = info.alpha.finite() && info.beta.finite();
        } else {
            c.tier = Classification::Tier::generalized_drazin;
        }
    } else if (!info.in_acc_acc) {
        c.tier = Classification::Tier::gz_invertible;
    } else {
        c.tier = Classification::Tier::none;
    }
    return c;
}

OperatorModel adjoint_model(const OperatorModel& m) {
    switch (m.kind) {
        case OperatorModel::Kind::finite_matrix:
            return make_matrix_model(adjoint(m.matrix));
        case OperatorModel::Kind::diagonal: {
            DiagonalModel d;
            for (const auto& e : m.diagonal.point_entries)
                d.point_entries.push_back({e.value.conj(), e.multiplicity});
            for (const auto& c : m.diagonal.cluster_entries)
                d.cluster_entries.push_back(conjugate_cluster(c));
            return make_diagonal_model(std::move(d));
        }
        case OperatorModel::Kind::shift: {
            ShiftModel s = m.shift;
            s.direction = s.direction == ShiftDirection::left ? ShiftDirection::right
                                                              : ShiftDirection::left;
            return make_shift_model(std::move(s));
        }
        case OperatorModel::Kind::direct_sum: {
            std::vector<OperatorModel> mapped;
            for (const auto& child : m.children) mapped.push_back(adjoint_model(child));
            return make_direct_sum(std::move(mapped));
        }
        case OperatorModel::Kind::affine:
            return make_affine(adjoint_model(m.children.front()), m.affine_a.conj(),
                               m.affine_b.conj());
        case OperatorModel::Kind::power:
            return make_power(adjoint_model(m.children.front()), m.power_n);
        case OperatorModel::Kind::perturbation: {
            std::vector<std::pair<std::size_t, ExactComplex>> support;
            for (const auto& [idx, v] : m.perturbation) support.push_back({idx, v.conj()});
            return make_perturbation(adjoint_model(make_diagonal_model(m.diagonal)),
                                     std::move(support));
        }
    }
    raise(ErrorCode::internal, "unhandled model kind in adjoint_model");
}

// --------------------------------------------------------------------------
// Diagonal g_z inverse
// --------------------------------------------------------------------------

namespace {

bool models_equivalent(const SpectrumModel& a, const SpectrumModel& b) {
    if (a.points.size() != b.points.size() || a.clusters.size() != b.clusters.size())
        return false;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (!(a.points[i] == b.points[i])) return false;  // both canonically sorted
    std::vector<bool> used(b.clusters.size(), false);
    for (const auto& ca : a.clusters) {
        bool matched = false;
        for (std::size_t j = 0; j < b.clusters.size() && !matched; ++j) {
            if (used[j]) continue;
            const auto& cb = b.clusters[j];
            if (!(ca.limit_value() == cb.limit_value())) continue;
            auto ea = ca.enumerate_entries(6);
            auto eb = cb.enumerate_entries(6);
            if (ea == eb) {
                used[j] = true;
                matched = true;
            }
        }
        if (!matched) return false;
    }
    return true;
}

}  // namespace

std::pair<OperatorModel, DiagonalGzCertificate> gz_inverse_diagonal(
    const OperatorModel& m, const SpectralSetSelection& sigma) {
    if (m.kind != OperatorModel::Kind::diagonal)
        raise(ErrorCode::invalid_argument, "gz_inverse_diagonal needs a plain diagonal model");
    const DiagonalModel& d = m.diagonal;
    SpectrumModel sp = diagonal_spectrum_model(d);
    if (!is_spectral_set(sp, sigma))
        raise(ErrorCode::invalid_spectral_set, "sigma is not a spectral set");
    SpectralSplit split = split_selection(sp, sigma);
    ExactComplex zero;
    if (split.complement.contains(zero))
        raise(ErrorCode::invalid_spectral_set, "0 lies in sigma(T) \\ sigma");

    auto side_selected = [&](const ExactComplex& v) {
        bool in_sel = split.selected.contains(v);
        bool in_comp = split.complement.contains(v);
        if (in_sel && in_comp)
            raise(ErrorCode::invalid_spectral_set,
                  "entry value lies on both sides of the selection");
        if (!in_sel && !in_comp)
            raise(ErrorCode::internal, "diagonal entry missing from its own spectrum");
        return in_sel;
    };

    // The spectrum model was built from the entry clusters in order.
    if (sp.clusters.size() != d.cluster_entries.size())
        raise(ErrorCode::internal, "entry clusters were merged during normalization");

    std::vector<std::vector<unsigned long>> moved(sp.clusters.size());
    for (const auto& mv : sigma.boundary_moves) moved[mv.cluster].push_back(mv.index);
    std::vector<bool> selected_cluster(sp.clusters.size(), false);
    for (const auto& cs : sigma.selected_clusters) selected_cluster[cs.index] = true;

    DiagonalModel inverse;
    bool zero_infinite = false;
    std::size_t zero_finite = 0;
    auto add_zero = [&](std::optional<std::size_t> mult) {
        if (!mult) zero_infinite = true;
        else zero_finite += *mult;
    };
    auto add_reciprocal_point = [&](const ExactComplex& v, std::optional<std::size_t> mult) {
        inverse.point_entries.push_back({ExactComplex(1, 0) / v, mult});
    };

    for (const auto& e : d.point_entries) {
        if (side_selected(e.value)) add_zero(e.multiplicity);
        else add_reciprocal_point(e.value, e.multiplicity);
    }
    for (std::size_t i = 0; i < sp.clusters.size(); ++i) {
        const Cluster& c = sp.clusters[i];
        if (selected_cluster[i]) {
            add_zero(std::nullopt);  // cofinitely many entries hit sigma
            for (unsigned long idx : moved[i]) {
                if (c.depth2()) {
                    std::vector<ExactComplex> pts;  // already reciprocals
                    reciprocal_cluster(c.detach_child(idx), pts, inverse.cluster_entries);
                    for (const auto& p : pts) inverse.point_entries.push_back({p, 1});
                } else {
                    add_reciprocal_point(c.atom(idx), 1);
                }
            }
        } else {
            Cluster base = c;
            if (!moved[i].empty()) {
                auto excl = c.excluded;
                for (unsigned long idx : moved[i]) {
                    if (c.depth2()) add_zero(std::nullopt);
                    else add_zero(std::size_t{1});
                    excl.push_back(idx);
                }
                base = make_cluster(c.limit, c.tail, c.removed_prefix, std::move(excl),
                                    c.child_tail, c.transform);
            }
            std::vector<ExactComplex> pts;
            reciprocal_cluster(base, pts, inverse.cluster_entries);
            for (const auto& p : pts) inverse.point_entries.push_back({p, 1});
        }
    }
    if (zero_infinite || zero_finite > 0) {
        DiagonalPointEntry zero_entry;
        zero_entry.value = zero;
        if (zero_infinite) zero_entry.multiplicity = std::nullopt;
        else zero_entry.multiplicity = zero_finite;
        inverse.point_entries.insert(inverse.point_entries.begin(), std::move(zero_entry));
    }

    DiagonalGzCertificate cert;
    cert.core_entries = affine_image(split.selected, ExactComplex(-1), ExactComplex());
    cert.core_zeroloid = is_zeroloid(cert.core_entries);
    cert.expected_spectrum = reciprocal_gz_image(sp, sigma);

    OperatorModel result = make_diagonal_model(std::move(inverse));
    cert.spectrum_matches =
        models_equivalent(spectrum(result).countable, cert.expected_spectrum);

    // Entrywise identities on a prefix: s (t s) = s and t s t = t resolve to
    // exact rational checks since s is 0 or 1/t.
    for (const auto& t : diagonal_entries(m, 24)) {
        ExactComplex s = side_selected(t) ? zero : ExactComplex(1, 0) / t;
        if (!(s * t * s == s)) cert.inner_identity = false;
        if (!(t * s * t == t) && !side_selected(t)) cert.inverse_regularity = false;
    }
    return {std::move(result), std::move(cert)};
}

OperatorModel make_perturbation(OperatorModel diagonal_base,
                                std::vector<std::pair<std::size_t, ExactComplex>> support) {
    DiagonalModel base;
    std::vector<std::pair<std::size_t, ExactComplex>> merged;
    if (diagonal_base.kind == OperatorModel::Kind::diagonal) {
        base = std::move(diagonal_base.diagonal);
    } else if (diagonal_base.kind == OperatorModel::Kind::perturbation) {
        base = std::move(diagonal_base.diagonal);
        merged = std::move(diagonal_base.perturbation);
    } else {
        raise(ErrorCode::invalid_argument, "perturbation base must be diagonal");
    }
    for (auto& [idx, v] : support) {
        bool replaced = false;
        for (auto& [i2, v2] : merged) {
            if (i2 == idx) {
                v2 = v;
                replaced = true;
            }
        }
        if (!replaced) merged.push_back({idx, v});
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    if (diagonal_is_finite(base)) {
        std::size_t total = diagonal_total_entries(base);
        for (const auto& [idx, v] : merged)
            if (idx >= total)
                raise(ErrorCode::invalid_argument, "perturbation index beyond a finite diagonal");
    }
    // Reject edits of depth-2 leaves (the spectrum edit is unrepresentable);
    // perturbed_spectrum_model performs the same check.
    if (!merged.empty()) {
        std::size_t max_idx = merged.back().first;
        auto sourced = enumerate_with_sources(base, max_idx + 1);
        for (const auto& [idx, v] : merged) {
            if (idx < sourced.size() && sourced[idx].source.kind == EntrySource::Kind::leaf)
                raise(ErrorCode::unsupported_spectral_shape,
                      "perturbation of depth-2 generated entries is unsupported");
        }
    }

    OperatorModel m;
    m.kind = OperatorModel::Kind::perturbation;
    m.diagonal = std::move(base);
    m.perturbation = std::move(merged);
    return m;
}

OperatorModel perturb(const OperatorModel& m,
                      std::vector<std::pair<std::size_t, ExactComplex>> support) {
    OperatorModel base = m;
    OperatorModel out = make_perturbation(std::move(base), std::move(support));
    // Theorem-level invariant: finite-support commuting edits never change the
    // g_z tier at 0.
    ExactComplex zero;
    bool before = point_info(m, zero).in_acc_acc;
    bool after = point_info(out, zero).in_acc_acc;
    if (before != after)
        raise(ErrorCode::internal, "perturbation changed the g_z tier at 0");
    return out;
}

// --------------------------------------------------------------------------
// Truncation
// --------------------------------------------------------------------------

namespace {

ComplexMatrix truncate_shift(const ShiftModel& s, Eigen::Index n) {
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        double w = s.weight(static_cast<unsigned long>(k)).get_d();
        if (s.direction == ShiftDirection::left) out(k - 1, k) = w;
        else out(k, k - 1) = w;
    }
    return out;
}

}  // namespace

ComplexMatrix truncate(const OperatorModel& m, Eigen::Index n) {
    if (n < 1) raise(ErrorCode::invalid_argument, "truncation size must be >= 1");
    switch (m.kind) {
        case OperatorModel::Kind::finite_matrix:
            if (n > m.matrix.rows())
                raise(ErrorCode::invalid_argument, "truncation exceeds the matrix size");
            return m.matrix.topLeftCorner(n, n);
        case OperatorModel::Kind::diagonal:
        case OperatorModel::Kind::perturbation: {
            auto entries = diagonal_entries(m, static_cast<std::size_t>(n));
            if (entries.size() < static_cast<std::size_t>(n))
                raise(ErrorCode::invalid_argument, "diagonal model has fewer entries than N");
            ComplexMatrix out = ComplexMatrix::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i) out(i, i) = entries[i].to_complex();
            return out;
        }
        case OperatorModel::Kind::shift:
            return truncate_shift(m.shift, n);
        case OperatorModel::Kind::power: {
            Eigen::Index extended = n + static_cast<Eigen::Index>(m.power_n);
            ComplexMatrix big = truncate_shift(m.children.front().shift, extended);
            return matrix_power(big, static_cast<Eigen::Index>(m.power_n)).topLeftCorner(n, n);
        }
        case OperatorModel::Kind::affine:
            return m.affine_a.to_complex() * truncate(m.children.front(), n) +
                   m.affine_b.to_complex() * ComplexMatrix::Identity(n, n);
        case OperatorModel::Kind::direct_sum: {
            ComplexMatrix out = truncate(m.children.front(), n);
            for (std::size_t i = 1; i < m.children.size(); ++i)
                out = direct_sum(out, truncate(m.children[i], n));
            return out;
        }
    }
    raise(ErrorCode::internal, "unhandled model kind in truncate");
}

}  // namespace gzspec
