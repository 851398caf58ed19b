// SPDX-License-Identifier: Apache-2.0
//
// Brute-force enumeration oracle for spectrum models, independent of the
// structural acc / iso / acc_acc implementations: it generates terms straight
// from the tail closed forms and decides accumulation by counting sample
// points in shrinking balls B(mu, 2^-k), k = 0..k_max. Because the balls are
// nested, "every ball contains another sample point" reduces to the nearest
// other sample point lying within the smallest radius.
//
// Terms whose offset from their limit drops below 2^-40 are recorded as
// "negligible" markers (anchor + bound) so ball counts stay exact without
// ten-thousand-bit rationals. Only transform-free models are supported; the
// randomized harness generates exactly those.
#pragma once

#include <algorithm>
#include <vector>

#include "gzspec/spectrum_model.hpp"

namespace gzspec::testing {

inline const Rational& negligible_bound() {
    static const Rational b = []() -> Rational {
        Rational two40 = pow_rational(Rational(2), 40);
        return Rational(Rational(1) / two40);
    }();
    return b;
}

struct OracleSample {
    std::vector<ExactComplex> exact;              // sorted lexicographically
    std::vector<ExactComplex> negligible;         // anchors; true point within 2^-40
};

namespace detail {

inline void sort_sample(std::vector<ExactComplex>& v) {
    std::sort(v.begin(), v.end(), exact_complex_less);
}

inline ExactComplex raw_term(const Cluster& c, unsigned long n) {
    return c.limit + tail_offset(c.tail, n);
}

}  // namespace detail

// First `budget` generated terms of the model (points plus per-cluster terms,
// shells for depth-2), values exact down to the 2^-40 floor.
inline OracleSample enumerate_sample(const SpectrumModel& s, std::size_t budget) {
    OracleSample sample;
    for (const auto& c : s.clusters) {
        if (!c.transform.identity())
            throw std::logic_error("oracle supports transform-free models only");
    }
    for (const auto& p : s.points) sample.exact.push_back(p);

    const Rational floor2 = negligible_bound() * negligible_bound();
    std::size_t n_tails = s.clusters.empty() ? 1 : s.clusters.size();
    std::size_t per_cluster = budget / n_tails;

    for (const auto& c : s.clusters) {
        std::size_t emitted = 0;
        if (!c.depth2()) {
            unsigned long n = c.first_active();
            while (emitted < per_cluster) {
                Rational off2 = tail_offset_abs2(c.tail, n);
                if (off2 <= floor2) {
                    sample.negligible.push_back(c.limit);
                    break;
                }
                sample.exact.push_back(detail::raw_term(c, n));
                ++emitted;
                n = c.next_active(n);
            }
            continue;
        }
        // Depth-2 shells: at shell s emit child limit a_s, then leaves
        // (a_i, m) with m = s - i (1-based over active child positions).
        std::vector<unsigned long> actives;
        std::vector<bool> child_done;
        unsigned long n = c.first_active();
        bool main_done = false;
        while (emitted < per_cluster) {
            actives.push_back(n);
            child_done.push_back(false);
            unsigned long a_s = actives.back();
            n = c.next_active(n);
            if (tail_offset_abs2(c.tail, a_s) <= floor2) {
                if (!main_done) {
                    sample.negligible.push_back(c.limit);
                    main_done = true;
                }
            } else {
                sample.exact.push_back(detail::raw_term(c, a_s));
                ++emitted;
            }
            bool any_child_open = false;
            for (std::size_t i = 0; i < actives.size() && emitted < per_cluster; ++i) {
                if (child_done[i]) continue;
                unsigned long k = actives[i];
                unsigned long m = static_cast<unsigned long>(actives.size() - i);
                Rational off2 = tail_offset_abs2(c.tail, k) * tail_offset_abs2(*c.child_tail, m);
                if (off2 <= floor2) {
                    Rational main2 = tail_offset_abs2(c.tail, k);
                    sample.negligible.push_back(main2 <= floor2 ? c.limit
                                                                : detail::raw_term(c, k));
                    child_done[i] = true;
                    continue;
                }
                any_child_open = true;
                ExactComplex o = tail_offset(c.tail, k);
                sample.exact.push_back(c.limit + o + o * tail_offset(*c.child_tail, m));
                ++emitted;
            }
            if (main_done && !any_child_open) break;
        }
    }
    detail::sort_sample(sample.exact);
    return sample;
}

// True iff some sample point other than mu lies in the closed ball of radius
// 2^-k_max around mu (equivalently: in every ball of the ladder).
inline bool oracle_is_acc(const OracleSample& sample, const ExactComplex& mu, int k_max) {
    Rational radius = Rational(1) / pow_rational(Rational(2), static_cast<unsigned long>(k_max));
    Rational r2 = radius * radius;

    // Window over the sorted exact sample: |re - mu.re| <= radius is necessary.
    Rational lo = mu.re - radius;
    Rational hi = mu.re + radius;
    auto begin = std::lower_bound(sample.exact.begin(), sample.exact.end(), lo,
                                  [](const ExactComplex& a, const Rational& v) { return a.re < v; });
    for (auto it = begin; it != sample.exact.end() && it->re <= hi; ++it) {
        if (*it == mu) continue;
        if ((*it - mu).abs2() <= r2) return true;
    }
    // Negligible markers: true point within 2^-40 of the anchor.
    Rational inner = radius - negligible_bound();
    Rational outer = radius + negligible_bound();
    for (const auto& anchor : sample.negligible) {
        Rational d2 = (anchor - mu).abs2();
        if (d2 <= inner * inner) return true;
        if (d2 <= outer * outer)
            throw std::logic_error("oracle ladder radius falls in a negligible band; "
                                   "retune the generator");
    }
    return false;
}

// Second stage: accumulation within a finite exact set (used for acc acc).
inline bool oracle_is_acc_of(const std::vector<ExactComplex>& set, const ExactComplex& mu,
                             int k_max) {
    Rational radius = Rational(1) / pow_rational(Rational(2), static_cast<unsigned long>(k_max));
    Rational r2 = radius * radius;
    for (const auto& v : set) {
        if (v == mu) continue;
        if ((v - mu).abs2() <= r2) return true;
    }
    return false;
}

}  // namespace gzspec::testing
