// SPDX-License-Identifier: Apache-2.0
#include "gzspec/json_io.hpp"

namespace gzspec {

namespace {

[[noreturn]] void bad(const std::string& what) { raise(ErrorCode::parse_error, what); }

const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) bad(std::string("missing field: ") + name);
    return j.at(name);
}

unsigned long as_index(const Json& j, const char* what) {
    if (!j.is_number_unsigned()) bad(std::string("expected nonnegative integer for ") + what);
    return j.get<unsigned long>();
}

}  // namespace

Json to_json(const Rational& q) { return rational_to_string(q); }

Json to_json(const ExactComplex& z) {
    return Json::array({rational_to_string(z.re), rational_to_string(z.im)});
}

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
    bad("expected rational");
}

ExactComplex exact_complex_from_json(const Json& j) {
    if (j.is_string()) return exact_complex_from_string(j.get<std::string>());
    if (j.is_array() && j.size() == 2)
        return {rational_from_json(j[0]), rational_from_json(j[1])};
    if (j.is_number()) return {rational_from_json(j), Rational(0)};
    bad("expected complex value as [re, im]");
}

Json to_json(const TailSpec& tail) {
    Json j;
    if (const auto* g = std::get_if<GeometricTail>(&tail)) {
        j["kind"] = "geometric";
        j["base"] = to_json(g->base);
        j["ratio"] = rational_to_string(g->ratio);
    } else {
        const auto& p = std::get<PowerTail>(tail);
        j["kind"] = "power";
        j["scale"] = to_json(p.scale);
        j["exponent"] = rational_to_string(Rational(static_cast<long>(p.exponent)));
    }
    return j;
}

TailSpec tail_from_json(const Json& j) {
    std::string kind = field(j, "kind").get<std::string>();
    if (kind == "geometric") {
        GeometricTail g{exact_complex_from_json(field(j, "base")),
                        rational_from_json(field(j, "ratio"))};
        validate_tail(TailSpec{g});
        return g;
    }
    if (kind == "power") {
        Rational e = rational_from_json(field(j, "exponent"));
        if (e.get_den() != 1 || sgn(e) <= 0 || !e.get_num().fits_ulong_p())
            bad("power tail exponent must be a positive integer");
        PowerTail p{exact_complex_from_json(field(j, "scale")), e.get_num().get_ui()};
        validate_tail(TailSpec{p});
        return p;
    }
    bad("unknown tail kind: " + kind);
}

namespace {

Json transform_to_json(const Transform& t) {
    Json ops = Json::array();
    for (const auto& op : t.ops) {
        Json o;
        if (const auto* a = std::get_if<AffineMap>(&op)) {
            o["kind"] = "affine";
            o["a"] = to_json(a->a);
            o["b"] = to_json(a->b);
        } else if (const auto* p = std::get_if<PowerMap>(&op)) {
            o["kind"] = "power";
            o["n"] = p->n;
        } else {
            o["kind"] = "reciprocal";
        }
        ops.push_back(std::move(o));
    }
    return ops;
}

Transform transform_from_json(const Json& j) {
    Transform t;
    if (!j.is_array()) bad("map must be an array of ops");
    for (const auto& o : j) {
        std::string kind = field(o, "kind").get<std::string>();
        if (kind == "affine") {
            t.ops.push_back(
                AffineMap{exact_complex_from_json(field(o, "a")), exact_complex_from_json(field(o, "b"))});
        } else if (kind == "power") {
            t.ops.push_back(PowerMap{as_index(field(o, "n"), "map power")});
        } else if (kind == "reciprocal") {
            t.ops.push_back(ReciprocalMap{});
        } else {
            bad("unknown map op: " + kind);
        }
    }
    return t;
}

}  // namespace

Json to_json(const Cluster& c) {
    Json j;
    j["limit"] = to_json(c.limit);
    j["tail"] = to_json(c.tail);
    j["removed_prefix"] = c.removed_prefix;
    if (!c.excluded.empty()) j["excluded"] = c.excluded;
    if (c.child_tail) {
        Json child;
        child["tail"] = to_json(*c.child_tail);
        j["children"] = Json::array({std::move(child)});
    }
    if (!c.transform.identity()) j["map"] = transform_to_json(c.transform);
    return j;
}

Cluster cluster_from_json(const Json& j) {
    ExactComplex limit = exact_complex_from_json(field(j, "limit"));
    TailSpec tail = tail_from_json(field(j, "tail"));
    std::size_t prefix = 0;
    if (j.contains("removed_prefix")) prefix = as_index(j.at("removed_prefix"), "removed_prefix");
    std::vector<unsigned long> excluded;
    if (j.contains("excluded")) {
        for (const auto& e : j.at("excluded")) excluded.push_back(as_index(e, "excluded index"));
    }
    std::optional<TailSpec> child;
    if (j.contains("children")) {
        const Json& kids = j.at("children");
        if (!kids.is_array() || kids.size() > 1)
            bad("children carries at most one tail template");
        if (kids.size() == 1) child = tail_from_json(field(kids[0], "tail"));
    }
    Transform t;
    if (j.contains("map")) t = transform_from_json(j.at("map"));
    return make_cluster(std::move(limit), std::move(tail), prefix, std::move(excluded),
                        std::move(child), std::move(t));
}

Json to_json(const SpectrumModel& s) {
    Json j;
    Json pts = Json::array();
    for (const auto& p : s.points) pts.push_back(to_json(p));
    j["points"] = std::move(pts);
    Json cls = Json::array();
    for (const auto& c : s.clusters) cls.push_back(to_json(c));
    j["clusters"] = std::move(cls);
    return j;
}

SpectrumModel spectrum_model_from_json(const Json& j) {
    std::vector<ExactComplex> points;
    std::vector<Cluster> clusters;
    if (j.contains("points"))
        for (const auto& p : j.at("points")) points.push_back(exact_complex_from_json(p));
    if (j.contains("clusters"))
        for (const auto& c : j.at("clusters")) clusters.push_back(cluster_from_json(c));
    return make_model(std::move(points), std::move(clusters));
}

Json to_json(const SpectralSetSelection& sel) {
    Json j;
    j["points"] = sel.selected_points;
    Json cls = Json::array();
    for (const auto& cs : sel.selected_clusters) {
        Json c;
        c["index"] = cs.index;
        c["mode"] = (cs.mode == ClusterMode::whole) ? "whole" : "limit_only";
        cls.push_back(std::move(c));
    }
    j["clusters"] = std::move(cls);
    Json moves = Json::array();
    for (const auto& mv : sel.boundary_moves) {
        Json m;
        m["cluster"] = mv.cluster;
        m["index"] = mv.index;
        moves.push_back(std::move(m));
    }
    j["moves"] = std::move(moves);
    return j;
}

Json matrix_to_json(const ComplexMatrix& a) {
    Json j;
    j["rows"] = a.rows();
    j["cols"] = a.cols();
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            entries.push_back(Json::array({a(r, c).real(), a(r, c).imag()}));
    j["entries"] = std::move(entries);
    return j;
}

ComplexMatrix matrix_from_json(const Json& j) {
    long rows = field(j, "rows").get<long>();
    long cols = field(j, "cols").get<long>();
    if (rows <= 0 || cols <= 0) bad("matrix dimensions must be positive");
    const Json& entries = field(j, "entries");
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(rows * cols))
        bad("matrix entry count does not match rows*cols");
    ComplexMatrix a(rows, cols);
    std::size_t idx = 0;
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c, ++idx) {
            const Json& e = entries[idx];
            if (e.is_array() && e.size() == 2) {
                a(r, c) = {e[0].get<double>(), e[1].get<double>()};
            } else if (e.is_number()) {
                a(r, c) = {e.get<double>(), 0.0};
            } else {
                bad("matrix entries must be [re, im] pairs");
            }
        }
    }
    check_finite(a);
    return a;
}

namespace {

Json shift_to_json(const ShiftModel& s) {
    Json j;
    j["direction"] = s.direction == ShiftDirection::left ? "left" : "right";
    Json w;
    if (const auto* c = std::get_if<ConstantWeights>(&s.weights)) {
        w["kind"] = "constant";
        w["value"] = rational_to_string(c->value);
        if (!c->prefix.empty()) {
            Json prefix = Json::array();
            for (const auto& p : c->prefix) prefix.push_back(rational_to_string(p));
            w["prefix"] = std::move(prefix);
        }
    } else {
        w["kind"] = "null";
        w["decay"] = to_json(std::get<NullWeights>(s.weights).decay);
    }
    j["weights"] = std::move(w);
    return j;
}

ShiftModel shift_from_json(const Json& j) {
    ShiftModel s;
    std::string dir = field(j, "direction").get<std::string>();
    if (dir == "left") s.direction = ShiftDirection::left;
    else if (dir == "right") s.direction = ShiftDirection::right;
    else bad("shift direction must be left or right");
    const Json& w = field(j, "weights");
    std::string kind = field(w, "kind").get<std::string>();
    if (kind == "constant") {
        ConstantWeights c;
        c.value = rational_from_json(field(w, "value"));
        if (w.contains("prefix"))
            for (const auto& p : w.at("prefix")) c.prefix.push_back(rational_from_json(p));
        s.weights = std::move(c);
    } else if (kind == "null") {
        const Json& decay = field(w, "decay");
        if (decay.is_string()) {
            std::string d = decay.get<std::string>();
            if (d == "1/n") s.weights = NullWeights{PowerTail{ExactComplex(1), 1}};
            else if (d == "1/n^2") s.weights = NullWeights{PowerTail{ExactComplex(1), 2}};
            else if (d == "2^-n")
                s.weights = NullWeights{GeometricTail{ExactComplex(1), make_rational(1, 2)}};
            else bad("unknown null decay shorthand: " + d);
        } else {
            s.weights = NullWeights{tail_from_json(decay)};
        }
    } else {
        bad("unknown weight kind: " + kind);
    }
    return s;
}

Json diagonal_to_json(const DiagonalModel& d) {
    Json j;
    Json pts = Json::array();
    for (const auto& e : d.point_entries) {
        Json p;
        p["value"] = to_json(e.value);
        if (e.multiplicity) p["multiplicity"] = *e.multiplicity;
        else p["multiplicity"] = "inf";
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    Json cls = Json::array();
    for (const auto& c : d.cluster_entries) cls.push_back(to_json(c));
    j["clusters"] = std::move(cls);
    return j;
}

DiagonalModel diagonal_from_json(const Json& j) {
    DiagonalModel d;
    if (j.contains("points")) {
        for (const auto& p : j.at("points")) {
            DiagonalPointEntry e;
            e.value = exact_complex_from_json(field(p, "value"));
            if (p.contains("multiplicity")) {
                const Json& m = p.at("multiplicity");
                if (m.is_string() && m.get<std::string>() == "inf") e.multiplicity = std::nullopt;
                else e.multiplicity = as_index(m, "multiplicity");
            }
            d.point_entries.push_back(std::move(e));
        }
    }
    if (j.contains("clusters"))
        for (const auto& c : j.at("clusters")) d.cluster_entries.push_back(cluster_from_json(c));
    return d;
}

}  // namespace

Json to_json(const OperatorModel& m) {
    Json j;
    switch (m.kind) {
        case OperatorModel::Kind::finite_matrix: {
            j = matrix_to_json(m.matrix);
            j["variant"] = "matrix";
            return j;
        }
        case OperatorModel::Kind::diagonal: {
            j = diagonal_to_json(m.diagonal);
            j["variant"] = "diagonal";
            return j;
        }
        case OperatorModel::Kind::shift: {
            j = shift_to_json(m.shift);
            j["variant"] = "shift";
            return j;
        }
        case OperatorModel::Kind::direct_sum: {
            j["variant"] = "direct_sum";
            Json kids = Json::array();
            for (const auto& c : m.children) kids.push_back(to_json(c));
            j["summands"] = std::move(kids);
            return j;
        }
        case OperatorModel::Kind::affine: {
            j["variant"] = "affine";
            j["base"] = to_json(m.children.front());
            j["a"] = to_json(m.affine_a);
            j["b"] = to_json(m.affine_b);
            return j;
        }
        case OperatorModel::Kind::power: {
            j["variant"] = "power";
            j["base"] = to_json(m.children.front());
            j["n"] = m.power_n;
            return j;
        }
        case OperatorModel::Kind::perturbation: {
            j["variant"] = "perturbation";
            j["base"] = diagonal_to_json(m.diagonal);
            Json support = Json::array();
            for (const auto& [idx, v] : m.perturbation) {
                Json s;
                s["index"] = idx;
                s["value"] = to_json(v);
                support.push_back(std::move(s));
            }
            j["support"] = std::move(support);
            return j;
        }
    }
    bad("unhandled operator variant");
}

OperatorModel operator_model_from_json(const Json& j) {
    std::string variant = field(j, "variant").get<std::string>();
    if (variant == "matrix") return make_matrix_model(matrix_from_json(j));
    if (variant == "diagonal") return make_diagonal_model(diagonal_from_json(j));
    if (variant == "shift") return make_shift_model(shift_from_json(j));
    if (variant == "direct_sum") {
        std::vector<OperatorModel> kids;
        for (const auto& c : field(j, "summands")) kids.push_back(operator_model_from_json(c));
        return make_direct_sum(std::move(kids));
    }
    if (variant == "affine") {
        return make_affine(operator_model_from_json(field(j, "base")),
                           exact_complex_from_json(field(j, "a")),
                           exact_complex_from_json(field(j, "b")));
    }
    if (variant == "power") {
        return make_power(operator_model_from_json(field(j, "base")),
                          as_index(field(j, "n"), "power"));
    }
    if (variant == "perturbation") {
        OperatorModel base = make_diagonal_model(diagonal_from_json(field(j, "base")));
        std::vector<std::pair<std::size_t, ExactComplex>> support;
        for (const auto& s : field(j, "support")) {
            support.push_back({as_index(field(s, "index"), "support index"),
                               exact_complex_from_json(field(s, "value"))});
        }
        return make_perturbation(std::move(base), std::move(support));
    }
    bad("unknown operator variant: " + variant);
}

SpectralSetSelection selection_from_json(const Json& j) {
    SpectralSetSelection sel;
    if (j.contains("points"))
        for (const auto& p : j.at("points"))
            sel.selected_points.push_back(as_index(p, "point index"));
    if (j.contains("clusters")) {
        for (const auto& c : j.at("clusters")) {
            if (c.is_number_unsigned()) {
                sel.selected_clusters.push_back({c.get<std::size_t>(), ClusterMode::whole});
            } else {
                ClusterMode mode = ClusterMode::whole;
                if (c.contains("mode")) {
                    std::string m = c.at("mode").get<std::string>();
                    if (m == "limit_only")
                        mode = ClusterMode::limit_only;
                    else if (m != "whole")
                        bad("unknown cluster selection mode: " + m);
                }
                sel.selected_clusters.push_back({as_index(field(c, "index"), "cluster index"), mode});
            }
        }
    }
    if (j.contains("moves")) {
        for (const auto& m : j.at("moves")) {
            sel.boundary_moves.push_back(
                {as_index(field(m, "cluster"), "move cluster"), as_index(field(m, "index"), "move index")});
        }
    }
    return sel;
}

}  // namespace gzspec
