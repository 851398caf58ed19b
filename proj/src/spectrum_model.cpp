// SPDX-License-Identifier: Apache-2.0
#include "gzspec/spectrum_model.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace gzspec {

namespace {

constexpr std::size_t kScanCap = 1u << 21;

// Incremental walk over raw offsets o_n with exact |o_n|^2.
class OffsetScan {
  public:
    OffsetScan(const TailSpec& tail, unsigned long start) : tail_(tail), n_(start) {
        if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
            ratio_pow_ = pow_rational(g->ratio, start);
        }
        refresh();
    }

    unsigned long index() const { return n_; }
    const ExactComplex& offset() const { return offset_; }
    const Rational& abs2() const { return abs2_; }

    void advance_to(unsigned long n) {
        if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
            for (; n_ < n; ++n_) ratio_pow_ *= g->ratio;
        } else {
            n_ = n;
        }
        refresh();
    }

  private:
    void refresh() {
        if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
            offset_ = ratio_pow_ * g->base;
        } else {
            offset_ = tail_offset(tail_, n_);
        }
        abs2_ = offset_.abs2();
    }

    const TailSpec& tail_;
    unsigned long n_;
    Rational ratio_pow_;
    ExactComplex offset_;
    Rational abs2_;
};

Rational child_radius_factor2(const TailSpec& child_tail) {
    // (1 + sup_m |child_offset(m)|)^2, certified upper bound. Offsets are
    // strictly decreasing in magnitude, so m = 1 dominates.
    Rational c0 = sqrt_upper(tail_offset_abs2(child_tail, 1));
    Rational f = Rational(1) + c0;
    return f * f;
}

}  // namespace

// --------------------------------------------------------------------------
// Tails
// --------------------------------------------------------------------------

ExactComplex tail_offset(const TailSpec& tail, unsigned long n) {
    if (const auto* g = std::get_if<GeometricTail>(&tail)) {
        return pow_rational(g->ratio, n) * g->base;
    }
    const auto& p = std::get<PowerTail>(tail);
    mpz_class npow;
    mpz_ui_pow_ui(npow.get_mpz_t(), n, p.exponent);
    Rational inv(1, npow);
    inv.canonicalize();
    return inv * p.scale;
}

Rational tail_offset_abs2(const TailSpec& tail, unsigned long n) {
    return tail_offset(tail, n).abs2();
}

TailSpec conjugate_tail(const TailSpec& tail) {
    if (const auto* g = std::get_if<GeometricTail>(&tail)) {
        return GeometricTail{g->base.conj(), g->ratio};
    }
    const auto& p = std::get<PowerTail>(tail);
    return PowerTail{p.scale.conj(), p.exponent};
}

void validate_tail(const TailSpec& tail) {
    if (const auto* g = std::get_if<GeometricTail>(&tail)) {
        if (g->base.is_zero()) raise(ErrorCode::invalid_argument, "geometric tail with zero base");
        Rational r2 = g->ratio * g->ratio;
        if (sgn(g->ratio) == 0 || r2 >= 1)
            raise(ErrorCode::invalid_argument, "geometric ratio must satisfy 0 < |ratio| < 1");
        return;
    }
    const auto& p = std::get<PowerTail>(tail);
    if (p.scale.is_zero()) raise(ErrorCode::invalid_argument, "power tail with zero scale");
    if (p.exponent == 0) raise(ErrorCode::invalid_argument, "power tail exponent must be >= 1");
}

// --------------------------------------------------------------------------
// Transform
// --------------------------------------------------------------------------

ExactComplex Transform::apply(const ExactComplex& z) const {
    ExactComplex v = z;
    for (const auto& op : ops) {
        if (const auto* a = std::get_if<AffineMap>(&op)) {
            v = a->a * v + a->b;
        } else if (const auto* p = std::get_if<PowerMap>(&op)) {
            v = exact_complex_pow(v, p->n);
        } else {
            v = ExactComplex(1, 0) / v;
        }
    }
    return v;
}

std::optional<Rational> Transform::lip2_on_disk(const ExactComplex& center,
                                                const Rational& radius2) const {
    ExactComplex c = center;
    Rational r2 = radius2;
    Rational lip2(1);
    for (const auto& op : ops) {
        if (const auto* a = std::get_if<AffineMap>(&op)) {
            Rational a2 = a->a.abs2();
            lip2 *= a2;
            r2 *= a2;
            c = a->a * c + a->b;
        } else if (const auto* p = std::get_if<PowerMap>(&op)) {
            if (p->n == 1) continue;
            Rational reach = sqrt_upper(c.abs2()) + sqrt_upper(r2);
            Rational m2 = reach * reach;
            Rational stage2 = Rational(static_cast<long>(p->n) * static_cast<long>(p->n)) *
                              pow_rational(m2, p->n - 1);
            lip2 *= stage2;
            r2 *= stage2;
            c = exact_complex_pow(c, p->n);
        } else {
            Rational dist = sqrt_lower(c.abs2()) - sqrt_upper(r2);
            if (sgn(dist) <= 0) return std::nullopt;
            Rational m2 = dist * dist;
            Rational stage2 = Rational(1) / (m2 * m2);
            lip2 *= stage2;
            r2 *= stage2;
            c = ExactComplex(1, 0) / c;
        }
    }
    return lip2;
}

void Transform::push_affine(const ExactComplex& a, const ExactComplex& b) {
    if (a.is_zero()) raise(ErrorCode::invalid_argument, "affine map with a = 0");
    if (!ops.empty()) {
        if (auto* last = std::get_if<AffineMap>(&ops.back())) {
            // a (a' z + b') + b = (a a') z + (a b' + b)
            last->b = a * last->b + b;
            last->a = a * last->a;
            return;
        }
    }
    ops.push_back(AffineMap{a, b});
}

void Transform::push_power(unsigned long n) {
    if (n == 0) raise(ErrorCode::invalid_argument, "power map with n = 0");
    if (n == 1) return;
    ops.push_back(PowerMap{n});
}

void Transform::push_reciprocal() { ops.push_back(ReciprocalMap{}); }

Transform conjugate_transform(const Transform& t) {
    Transform out;
    out.ops.reserve(t.ops.size());
    for (const auto& op : t.ops) {
        if (const auto* a = std::get_if<AffineMap>(&op)) {
            out.ops.push_back(AffineMap{a->a.conj(), a->b.conj()});
        } else {
            out.ops.push_back(op);
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// Cluster
// --------------------------------------------------------------------------

bool Cluster::active(unsigned long n) const {
    if (n == 0 || n <= removed_prefix) return false;
    return !std::binary_search(excluded.begin(), excluded.end(), n);
}

unsigned long Cluster::first_active() const {
    unsigned long n = static_cast<unsigned long>(removed_prefix) + 1;
    while (!active(n)) ++n;
    return n;
}

unsigned long Cluster::next_active(unsigned long n) const {
    ++n;
    while (!active(n)) ++n;
    return n;
}

ExactComplex Cluster::raw_atom(unsigned long n) const { return limit + tail_offset(tail, n); }

ExactComplex Cluster::atom(unsigned long n) const { return transform.apply(raw_atom(n)); }

ExactComplex Cluster::raw_leaf(unsigned long n, unsigned long m) const {
    ExactComplex o = tail_offset(tail, n);
    return limit + o + o * tail_offset(*child_tail, m);
}

ExactComplex Cluster::leaf(unsigned long n, unsigned long m) const {
    return transform.apply(raw_leaf(n, m));
}

ExactComplex Cluster::limit_value() const { return transform.apply(limit); }

namespace {

// Exact solve of tail_offset(tail, n) == value for n >= 1.
std::optional<unsigned long> solve_tail_index(const TailSpec& tail, const ExactComplex& value) {
    if (value.is_zero()) return std::nullopt;
    if (const auto* g = std::get_if<GeometricTail>(&tail)) {
        ExactComplex rho = value / g->base;  // must equal ratio^n
        if (!rho.is_real()) return std::nullopt;
        Rational target = rho.re;
        Rational target_abs = abs(target);
        Rational q = g->ratio;
        if (abs(q) < target_abs) return std::nullopt;
        unsigned long n = 1;
        std::size_t guard = 0;
        while (abs(q) > target_abs) {
            q *= g->ratio;
            ++n;
            if (++guard > kScanCap) raise(ErrorCode::internal, "tail solve exceeded cap");
        }
        if (q == target) return n;
        return std::nullopt;
    }
    const auto& p = std::get<PowerTail>(tail);
    ExactComplex rho = value / p.scale;  // must equal n^{-e}
    if (!rho.is_real() || sgn(rho.re) <= 0) return std::nullopt;
    Rational w = Rational(1) / rho.re;  // n^e
    if (w.get_den() != 1) return std::nullopt;
    mpz_class root;
    int exact = mpz_root(root.get_mpz_t(), w.get_num().get_mpz_t(), p.exponent);
    if (exact == 0 || !root.fits_ulong_p()) return std::nullopt;
    unsigned long n = root.get_ui();
    if (n < 1) return std::nullopt;
    return n;
}

Rational require_lip2(const Cluster& c) {
    if (c.transform.identity()) return Rational(1);
    Rational r2 = tail_offset_abs2(c.tail, c.first_active());
    if (c.depth2()) r2 *= child_radius_factor2(*c.child_tail);
    auto lip2 = c.transform.lip2_on_disk(c.limit, r2);
    if (!lip2) raise(ErrorCode::internal, "cluster transform inadmissible");
    return *lip2;
}

enum class MemberKind { atom, leaf };

// Generic exact scan over a cluster's members near a target value; visits
// every atom / leaf whose value could equal `v` under the certified Lipschitz
// bound, in index order, stopping early once visit returns true. Used for
// transformed clusters; identity clusters take the closed-form solve paths.
template <typename Visit>
bool scan_members(const Cluster& c, const ExactComplex& v, Visit visit) {
    Rational lip2 = require_lip2(c);
    Rational target2 = (v - c.limit_value()).abs2();
    if (sgn(target2) == 0) return false;  // v is the limit, not a generated member

    Rational depth_factor2(1);
    if (c.depth2()) depth_factor2 = child_radius_factor2(*c.child_tail);

    std::size_t steps = 0;
    OffsetScan scan(c.tail, c.first_active());
    while (true) {
        if (++steps > kScanCap) raise(ErrorCode::internal, "membership scan exceeded cap");
        Rational reach2 = lip2 * scan.abs2() * depth_factor2;
        if (reach2 < target2) break;
        unsigned long n = scan.index();
        ExactComplex an = c.atom(n);
        if (visit(MemberKind::atom, n, 0UL, an)) return true;
        if (c.depth2()) {
            Rational inner_target2 = (v - an).abs2();
            if (sgn(inner_target2) > 0) {
                std::size_t inner_steps = 0;
                OffsetScan child(*c.child_tail, 1);
                while (true) {
                    if (++inner_steps > kScanCap)
                        raise(ErrorCode::internal, "leaf scan exceeded cap");
                    Rational leaf_reach2 = lip2 * scan.abs2() * child.abs2();
                    if (leaf_reach2 < inner_target2) break;
                    if (visit(MemberKind::leaf, n, child.index(), c.leaf(n, child.index())))
                        return true;
                    child.advance_to(child.index() + 1);
                }
            }
        }
        scan.advance_to(c.next_active(n));
    }
    return false;
}

// Identity-transform depth-2 leaf search: leaf(n, m) = limit + o_n (1 + c_m),
// so candidate parent indices n form a band around |v - limit| and the child
// index solves in closed form. visit(n, m) per exact match.
template <typename Visit>
void scan_leaves_identity(const Cluster& c, const ExactComplex& v, Visit visit) {
    ExactComplex delta = v - c.limit;
    Rational delta2 = delta.abs2();
    if (sgn(delta2) == 0) return;
    Rational band2 = child_radius_factor2(*c.child_tail);

    std::size_t steps = 0;
    OffsetScan scan(c.tail, c.first_active());
    while (true) {
        if (++steps > kScanCap) raise(ErrorCode::internal, "leaf scan exceeded cap");
        if (scan.abs2() * band2 < delta2) break;
        unsigned long n = scan.index();
        ExactComplex child_offset = (delta - scan.offset()) / scan.offset();
        if (auto m = solve_tail_index(*c.child_tail, child_offset)) {
            if (visit(n, *m)) return;
        }
        scan.advance_to(c.next_active(n));
    }
}

}  // namespace

bool Cluster::contains(const ExactComplex& v) const {
    if (v == limit_value()) return true;
    if (transform.identity()) {
        if (auto n = solve_tail_index(tail, v - limit); n && active(*n)) return true;
        if (!depth2()) return false;
        bool found = false;
        scan_leaves_identity(*this, v, [&](unsigned long n, unsigned long) {
            found = active(n);
            return found;
        });
        return found;
    }
    return scan_members(*this, v,
                        [&](MemberKind, unsigned long n, unsigned long, const ExactComplex& val) {
                            return active(n) && val == v;
                        });
}

std::size_t Cluster::count_entries(const ExactComplex& v) const {
    std::size_t count = 0;
    if (transform.identity()) {
        if (auto n = solve_tail_index(tail, v - limit); n && active(*n)) ++count;
        if (depth2()) {
            scan_leaves_identity(*this, v, [&](unsigned long n, unsigned long) {
                if (active(n)) ++count;
                return false;
            });
        }
        return count;
    }
    scan_members(*this, v,
                 [&](MemberKind, unsigned long n, unsigned long, const ExactComplex& val) {
                     if (active(n) && val == v) ++count;
                     return false;
                 });
    return count;
}

bool Cluster::contains_isolated(const ExactComplex& v) const {
    if (transform.identity()) {
        if (!depth2()) {
            auto n = solve_tail_index(tail, v - limit);
            return n && active(*n);
        }
        bool found = false;
        scan_leaves_identity(*this, v, [&](unsigned long n, unsigned long) {
            found = active(n);
            return found;
        });
        // A leaf can coincide with an accumulation point of the same cluster
        // (another child's limit); such a value is not isolated.
        return found && !contains_acc(v);
    }
    MemberKind iso_kind = depth2() ? MemberKind::leaf : MemberKind::atom;
    bool found = scan_members(
        *this, v, [&](MemberKind kind, unsigned long n, unsigned long, const ExactComplex& val) {
            return kind == iso_kind && active(n) && val == v;
        });
    return found && !(depth2() && contains_acc(v));
}

bool Cluster::contains_acc(const ExactComplex& v) const {
    if (v == limit_value()) return true;
    if (!depth2()) return false;
    return find_atom(v).has_value();
}

std::optional<unsigned long> Cluster::find_atom(const ExactComplex& v) const {
    if (transform.identity()) {
        auto n = solve_tail_index(tail, v - limit);
        if (n && active(*n)) return n;
        return std::nullopt;
    }
    std::optional<unsigned long> found;
    scan_members(*this, v,
                 [&](MemberKind kind, unsigned long n, unsigned long, const ExactComplex& val) {
                     if (kind == MemberKind::atom && active(n) && val == v) {
                         found = n;
                         return true;
                     }
                     return false;
                 });
    return found;
}

std::vector<ExactComplex> Cluster::enumerate_entries(std::size_t count) const {
    std::vector<ExactComplex> out;
    out.reserve(count);
    if (!depth2()) {
        unsigned long n = first_active();
        while (out.size() < count) {
            out.push_back(atom(n));
            n = next_active(n);
        }
        return out;
    }
    // Shell order: child limit a_s, then leaves (a_i, s + 1 - i).
    std::vector<unsigned long> actives;
    unsigned long n = first_active();
    for (std::size_t s = 1; out.size() < count; ++s) {
        actives.push_back(n);
        n = next_active(n);
        out.push_back(atom(actives.back()));
        for (std::size_t i = 1; i <= s && out.size() < count; ++i) {
            out.push_back(leaf(actives[i - 1], static_cast<unsigned long>(s + 1 - i)));
        }
    }
    if (out.size() > count) out.resize(count);
    return out;
}

std::vector<ExactComplex> Cluster::enumerate_isolated(std::size_t count) const {
    if (!depth2()) return enumerate_entries(count);
    std::vector<ExactComplex> out;
    out.reserve(count);
    std::vector<unsigned long> actives;
    unsigned long n = first_active();
    for (std::size_t s = 1; out.size() < count; ++s) {
        actives.push_back(n);
        n = next_active(n);
        for (std::size_t i = 1; i <= s && out.size() < count; ++i) {
            ExactComplex v = leaf(actives[i - 1], static_cast<unsigned long>(s + 1 - i));
            // skip leaves that land on an accumulation point of the cluster
            if (!contains_acc(v)) out.push_back(std::move(v));
        }
    }
    return out;
}

Cluster Cluster::detach_child(unsigned long k) const {
    if (!depth2() || !active(k)) raise(ErrorCode::internal, "detach_child on invalid index");
    ExactComplex o = tail_offset(tail, k);
    TailSpec scaled;
    if (const auto* g = std::get_if<GeometricTail>(&*child_tail)) {
        scaled = GeometricTail{o * g->base, g->ratio};
    } else {
        const auto& p = std::get<PowerTail>(*child_tail);
        scaled = PowerTail{o * p.scale, p.exponent};
    }
    return make_cluster(raw_atom(k), scaled, 0, {}, std::nullopt, transform);
}

Cluster make_cluster(ExactComplex limit, TailSpec tail, std::size_t removed_prefix,
                     std::vector<unsigned long> excluded, std::optional<TailSpec> child_tail,
                     Transform transform) {
    validate_tail(tail);
    if (child_tail) validate_tail(*child_tail);
    for (const auto& op : transform.ops) {
        if (const auto* a = std::get_if<AffineMap>(&op)) {
            if (a->a.is_zero()) raise(ErrorCode::invalid_argument, "affine map with a = 0");
        } else if (const auto* p = std::get_if<PowerMap>(&op)) {
            if (p->n == 0) raise(ErrorCode::invalid_argument, "power map with n = 0");
        }
    }
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    if (!excluded.empty() && excluded.front() == 0)
        raise(ErrorCode::invalid_argument, "cluster indices start at 1");

    Cluster c;
    c.limit = std::move(limit);
    c.tail = std::move(tail);
    c.removed_prefix = removed_prefix;
    c.excluded = std::move(excluded);
    c.child_tail = std::move(child_tail);
    c.transform = std::move(transform);

    {
        Rational r2 = tail_offset_abs2(c.tail, c.first_active());
        if (c.depth2()) r2 *= child_radius_factor2(*c.child_tail);
        if (!c.transform.lip2_on_disk(c.limit, r2))
            raise(ErrorCode::invalid_argument, "transform undefined on the cluster disk");
    }

    // Distinctness of generated terms within each closed-form family, checked
    // on a prefix: the limit and the main-tail atoms must be pairwise
    // distinct, and each child's leaves must be distinct from each other and
    // from their own child limit. Coincidences ACROSS families (a leaf hitting
    // another child's limit, as in 1/5 + 1/20 = 1/4) are legitimate set
    // redundancies; iso/acc handle them explicitly. Raw tails are injective by
    // closed form; a power map can collide far terms, so the checked prefix is
    // longer when one is present.
    bool has_power = false;
    for (const auto& op : c.transform.ops)
        if (std::holds_alternative<PowerMap>(op)) has_power = true;
    std::size_t prefix = has_power ? 128 : 48;

    auto check_distinct = [](std::vector<ExactComplex> sample) {
        std::sort(sample.begin(), sample.end(), exact_complex_less);
        for (std::size_t i = 1; i < sample.size(); ++i) {
            if (sample[i - 1] == sample[i])
                raise(ErrorCode::invalid_argument, "tail generates duplicate terms");
        }
    };

    std::vector<ExactComplex> main_family;
    main_family.push_back(c.limit_value());
    unsigned long n = c.first_active();
    for (std::size_t i = 0; i < prefix; ++i) {
        main_family.push_back(c.atom(n));
        n = c.next_active(n);
    }
    check_distinct(std::move(main_family));

    if (c.depth2()) {
        unsigned long a = c.first_active();
        for (std::size_t i = 0; i < 6; ++i) {
            std::vector<ExactComplex> child_family;
            child_family.push_back(c.atom(a));
            for (unsigned long m = 1; m <= 12; ++m) child_family.push_back(c.leaf(a, m));
            check_distinct(std::move(child_family));
            a = c.next_active(a);
        }
    }
    return c;
}

Cluster conjugate_cluster(const Cluster& c) {
    std::optional<TailSpec> child;
    if (c.child_tail) child = conjugate_tail(*c.child_tail);
    return make_cluster(c.limit.conj(), conjugate_tail(c.tail), c.removed_prefix, c.excluded,
                        child, conjugate_transform(c.transform));
}

// --------------------------------------------------------------------------
// SpectrumModel
// --------------------------------------------------------------------------

bool SpectrumModel::contains(const ExactComplex& v) const {
    for (const auto& p : points)
        if (p == v) return true;
    for (const auto& c : clusters)
        if (c.contains(v)) return true;
    return false;
}

SpectrumModel make_model(std::vector<ExactComplex> points, std::vector<Cluster> clusters) {
    // Canonical point order, duplicates removed.
    std::sort(points.begin(), points.end(), exact_complex_less);
    points.erase(std::unique(points.begin(), points.end()), points.end());

    // Reconcile coincidences between a cluster's limit and another cluster's
    // isolated terms: excise the term (the value stays represented by the
    // limit). A hit on a depth-2 leaf cannot be excised finitely.
    bool changed = true;
    std::size_t rounds = 0;
    while (changed) {
        changed = false;
        if (++rounds > clusters.size() * clusters.size() + 4)
            raise(ErrorCode::internal, "normalization did not settle");
        for (std::size_t i = 0; i < clusters.size() && !changed; ++i) {
            ExactComplex li = clusters[i].limit_value();
            for (std::size_t j = 0; j < clusters.size() && !changed; ++j) {
                if (i == j) continue;
                if (!clusters[j].contains_isolated(li)) continue;
                if (clusters[j].depth2())
                    raise(ErrorCode::depth_overflow,
                          "cluster limit coincides with a depth-2 term; accumulation depth "
                          "would exceed 2");
                auto idx = clusters[j].find_atom(li);
                if (!idx) raise(ErrorCode::internal, "isolated hit without atom index");
                auto excl = clusters[j].excluded;
                excl.push_back(*idx);
                clusters[j] = make_cluster(clusters[j].limit, clusters[j].tail,
                                           clusters[j].removed_prefix, std::move(excl),
                                           clusters[j].child_tail, clusters[j].transform);
                changed = true;
            }
        }
    }

    // Absorb points already represented by a cluster.
    std::vector<ExactComplex> kept;
    kept.reserve(points.size());
    for (auto& p : points) {
        bool absorbed = false;
        for (const auto& c : clusters) {
            if (c.contains(p)) {
                absorbed = true;
                break;
            }
        }
        if (!absorbed) kept.push_back(std::move(p));
    }

    SpectrumModel s;
    s.points = std::move(kept);
    s.clusters = std::move(clusters);
    return s;
}

SpectrumModel acc(const SpectrumModel& s) {
    std::vector<ExactComplex> pts;
    std::vector<Cluster> cls;
    for (const auto& c : s.clusters) {
        if (c.depth2()) {
            cls.push_back(make_cluster(c.limit, c.tail, c.removed_prefix, c.excluded, std::nullopt,
                                       c.transform));
        } else {
            pts.push_back(c.limit_value());
        }
    }
    return make_model(std::move(pts), std::move(cls));
}

std::vector<ExactComplex> acc_acc(const SpectrumModel& s) {
    SpectrumModel second = acc(acc(s));
    if (!second.clusters.empty()) raise(ErrorCode::internal, "acc(acc(S)) must be finite");
    return second.points;
}

IsolatedPart iso(const SpectrumModel& s) {
    IsolatedPart part;
    part.points = s.points;
    part.term_generators = s.clusters;
    part.accumulation = acc(s);
    return part;
}

std::vector<ExactComplex> IsolatedPart::enumerate(std::size_t per_generator) const {
    std::vector<ExactComplex> out = points;
    for (const auto& g : term_generators) {
        for (auto& t : g.enumerate_isolated(per_generator)) {
            if (!accumulation.contains(t)) out.push_back(std::move(t));
        }
    }
    return out;
}

bool IsolatedPart::contains(const ExactComplex& v) const {
    if (accumulation.contains(v)) return false;
    for (const auto& p : points)
        if (p == v) return true;
    for (const auto& g : term_generators)
        if (g.contains_isolated(v)) return true;
    return false;
}

const char* spectral_class_name(SpectralClass c) {
    switch (c) {
        case SpectralClass::Invertible: return "invertible";
        case SpectralClass::GeneralizedDrazin: return "generalized_drazin";
        case SpectralClass::GzInvertible: return "gz_invertible";
        case SpectralClass::NotGzInvertible: return "not_gz_invertible";
    }
    return "unknown";
}

SpectralClass classify_zero(const SpectrumModel& s) {
    ExactComplex zero;
    if (!s.contains(zero)) return SpectralClass::Invertible;
    SpectrumModel first = acc(s);
    if (!first.contains(zero)) return SpectralClass::GeneralizedDrazin;
    for (const auto& v : acc_acc(s))
        if (v == zero) return SpectralClass::NotGzInvertible;
    return SpectralClass::GzInvertible;
}

bool is_zeroloid(const SpectrumModel& s) {
    SpectrumModel a = acc(s);
    if (!a.clusters.empty()) return false;
    for (const auto& p : a.points)
        if (!p.is_zero()) return false;
    return true;
}

// --------------------------------------------------------------------------
// Selections
// --------------------------------------------------------------------------

namespace {

struct SelectionView {
    std::vector<bool> point_selected;
    std::vector<int> cluster_mode;  // -1 complement, 0 whole, 1 limit_only
    std::vector<std::vector<unsigned long>> moves;  // per cluster, validated indices
};

SelectionView validate_selection(const SpectrumModel& s, const SpectralSetSelection& sel) {
    SelectionView view;
    view.point_selected.assign(s.points.size(), false);
    view.cluster_mode.assign(s.clusters.size(), -1);
    view.moves.resize(s.clusters.size());

    for (std::size_t i : sel.selected_points) {
        if (i >= s.points.size())
            raise(ErrorCode::malformed_selection, "selected point index out of range");
        if (view.point_selected[i])
            raise(ErrorCode::malformed_selection, "point selected twice");
        view.point_selected[i] = true;
    }
    for (const auto& cs : sel.selected_clusters) {
        if (cs.index >= s.clusters.size())
            raise(ErrorCode::malformed_selection, "selected cluster index out of range");
        if (view.cluster_mode[cs.index] != -1)
            raise(ErrorCode::malformed_selection, "cluster selected twice");
        view.cluster_mode[cs.index] = (cs.mode == ClusterMode::whole) ? 0 : 1;
    }
    if (sel.boundary_moves.size() > SpectralSetSelection::max_boundary_moves)
        raise(ErrorCode::malformed_selection, "boundary move cap exceeded");
    for (const auto& mv : sel.boundary_moves) {
        if (mv.cluster >= s.clusters.size())
            raise(ErrorCode::malformed_selection, "boundary move references unknown cluster");
        if (!s.clusters[mv.cluster].active(mv.index))
            raise(ErrorCode::malformed_selection, "boundary move references a non-atom index");
        auto& lst = view.moves[mv.cluster];
        if (std::find(lst.begin(), lst.end(), mv.index) != lst.end())
            raise(ErrorCode::malformed_selection, "duplicate boundary move");
        lst.push_back(mv.index);
    }
    return view;
}

}  // namespace

bool is_spectral_set(const SpectrumModel& s, const SpectralSetSelection& sel) {
    SelectionView view = validate_selection(s, sel);
    for (std::size_t j = 0; j < s.clusters.size(); ++j) {
        // Cofinitely many terms sit on the cluster's base side; the limit must
        // sit there too. limit_only puts the limit alone on the selected side,
        // which strands the tail: the complement is then not closed.
        bool tail_selected = view.cluster_mode[j] == 0;
        bool limit_selected = view.cluster_mode[j] >= 0;
        if (tail_selected != limit_selected) return false;
    }
    return true;
}

SpectralSplit split_selection(const SpectrumModel& s, const SpectralSetSelection& sel) {
    if (!is_spectral_set(s, sel))
        raise(ErrorCode::invalid_spectral_set, "selection is not a spectral set");
    SelectionView view = validate_selection(s, sel);

    std::vector<ExactComplex> sel_points, comp_points;
    std::vector<Cluster> sel_clusters, comp_clusters;

    for (std::size_t i = 0; i < s.points.size(); ++i) {
        (view.point_selected[i] ? sel_points : comp_points).push_back(s.points[i]);
    }
    for (std::size_t j = 0; j < s.clusters.size(); ++j) {
        const Cluster& c = s.clusters[j];
        bool selected = view.cluster_mode[j] == 0;
        auto& home_clusters = selected ? sel_clusters : comp_clusters;
        auto& away_points = selected ? comp_points : sel_points;
        auto& away_clusters = selected ? comp_clusters : sel_clusters;

        if (view.moves[j].empty()) {
            home_clusters.push_back(c);
            continue;
        }
        auto excl = c.excluded;
        for (unsigned long idx : view.moves[j]) {
            if (c.depth2()) {
                away_clusters.push_back(c.detach_child(idx));
            } else {
                away_points.push_back(c.atom(idx));
            }
            excl.push_back(idx);
        }
        home_clusters.push_back(make_cluster(c.limit, c.tail, c.removed_prefix, std::move(excl),
                                             c.child_tail, c.transform));
    }

    SpectralSplit split;
    split.selected = make_model(std::move(sel_points), std::move(sel_clusters));
    split.complement = make_model(std::move(comp_points), std::move(comp_clusters));
    return split;
}

// --------------------------------------------------------------------------
// Images
// --------------------------------------------------------------------------

Cluster cluster_affine(const Cluster& c, const ExactComplex& a, const ExactComplex& b) {
    if (a.is_zero()) raise(ErrorCode::invalid_argument, "cluster affine image needs a != 0");
    Transform t = c.transform;
    t.push_affine(a, b);
    return make_cluster(c.limit, c.tail, c.removed_prefix, c.excluded, c.child_tail, std::move(t));
}

Cluster cluster_power(const Cluster& c, unsigned long n) {
    if (n == 0) raise(ErrorCode::invalid_argument, "cluster power image needs n >= 1");
    if (n == 1) return c;
    // (b r^k)^n and (s k^{-e})^n keep a closed form around 0.
    if (c.transform.identity() && c.limit.is_zero() && !c.depth2()) {
        TailSpec mapped;
        if (const auto* g = std::get_if<GeometricTail>(&c.tail)) {
            mapped = GeometricTail{exact_complex_pow(g->base, n), pow_rational(g->ratio, n)};
        } else {
            const auto& p = std::get<PowerTail>(c.tail);
            mapped = PowerTail{exact_complex_pow(p.scale, n), p.exponent * n};
        }
        return make_cluster(ExactComplex(), std::move(mapped), c.removed_prefix, c.excluded,
                            std::nullopt, {});
    }
    Transform t = c.transform;
    t.push_power(n);
    return make_cluster(c.limit, c.tail, c.removed_prefix, c.excluded, c.child_tail, std::move(t));
}

SpectrumModel affine_image(const SpectrumModel& s, const ExactComplex& a, const ExactComplex& b) {
    if (a.is_zero()) {
        if (s.empty()) return {};
        return make_model({b}, {});
    }
    std::vector<ExactComplex> pts;
    pts.reserve(s.points.size());
    for (const auto& p : s.points) pts.push_back(a * p + b);
    std::vector<Cluster> cls;
    cls.reserve(s.clusters.size());
    for (const auto& c : s.clusters) cls.push_back(cluster_affine(c, a, b));
    return make_model(std::move(pts), std::move(cls));
}

SpectrumModel power_image(const SpectrumModel& s, unsigned long n) {
    if (n == 0) raise(ErrorCode::invalid_argument, "power image needs n >= 1");
    if (n == 1) return s;
    std::vector<ExactComplex> pts;
    pts.reserve(s.points.size());
    for (const auto& p : s.points) pts.push_back(exact_complex_pow(p, n));
    std::vector<Cluster> cls;
    cls.reserve(s.clusters.size());
    for (const auto& c : s.clusters) cls.push_back(cluster_power(c, n));
    return make_model(std::move(pts), std::move(cls));
}

void reciprocal_cluster(const Cluster& c, std::vector<ExactComplex>& points_out,
                        std::vector<Cluster>& clusters_out) {
    // Excise leading terms until the (transformed) cluster disk clears 0, then
    // compose the reciprocal map; excised terms become explicit points.
    Rational factor2(1);
    if (c.depth2()) factor2 = child_radius_factor2(*c.child_tail);

    auto admissible = [&](unsigned long from) {
        Transform t = c.transform;
        t.push_reciprocal();
        return t.lip2_on_disk(c.limit, tail_offset_abs2(c.tail, from) * factor2).has_value();
    };

    std::vector<unsigned long> excised;
    unsigned long start = c.first_active();
    std::size_t guard = 0;
    while (!admissible(start)) {
        if (++guard > 4096)
            raise(ErrorCode::internal, "reciprocal image: excision did not converge");
        if (c.depth2()) {
            reciprocal_cluster(c.detach_child(start), points_out, clusters_out);
        } else {
            ExactComplex v = c.atom(start);
            if (v.is_zero()) raise(ErrorCode::invalid_spectral_set, "0 in the complement side");
            points_out.push_back(ExactComplex(1, 0) / v);
        }
        excised.push_back(start);
        start = c.next_active(start);
    }

    auto excl = c.excluded;
    excl.insert(excl.end(), excised.begin(), excised.end());
    Transform t = c.transform;
    t.push_reciprocal();
    clusters_out.push_back(
        make_cluster(c.limit, c.tail, c.removed_prefix, std::move(excl), c.child_tail, std::move(t)));
}

SpectrumModel reciprocal_gz_image(const SpectrumModel& s, const SpectralSetSelection& sel) {
    SpectralSplit split = split_selection(s, sel);
    ExactComplex zero;
    if (split.complement.contains(zero))
        raise(ErrorCode::invalid_spectral_set, "0 lies in S \\ sigma");

    std::vector<ExactComplex> pts;
    std::vector<Cluster> cls;
    if (!split.selected.empty()) pts.push_back(zero);
    for (const auto& p : split.complement.points) pts.push_back(ExactComplex(1, 0) / p);
    for (const auto& c : split.complement.clusters) reciprocal_cluster(c, pts, cls);
    return make_model(std::move(pts), std::move(cls));
}

SpectrumModel set_union(const SpectrumModel& a, const SpectrumModel& b) {
    std::vector<ExactComplex> pts = a.points;
    pts.insert(pts.end(), b.points.begin(), b.points.end());
    std::vector<Cluster> cls = a.clusters;
    cls.insert(cls.end(), b.clusters.begin(), b.clusters.end());
    return make_model(std::move(pts), std::move(cls));
}

}  // namespace gzspec
