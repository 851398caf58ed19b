// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "gzspec/errors.hpp"

namespace gzspec {

// Exact rational scalar. All set-membership and equality decisions in the
// spectral-set layer run on these; doubles only appear at the numeric boundary.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);

// Accepts "p/q", plain integers, and finite decimals ("0.5", "-1.25").
Rational rational_from_string(const std::string& text);

// Exact dyadic conversion; rejects NaN/Inf.
Rational rational_from_double(double value);

std::string rational_to_string(const Rational& value);

// Largest rational r with r^2 <= value, and smallest with r^2 >= value.
// Used for certified Lipschitz bounds; value must be nonnegative.
Rational sqrt_lower(const Rational& value);
Rational sqrt_upper(const Rational& value);

Rational pow_rational(const Rational& base, unsigned long exponent);

struct ExactComplex {
    Rational re;
    Rational im;

    ExactComplex() : re(0), im(0) {}
    ExactComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    explicit ExactComplex(long r, long i = 0) : re(r), im(i) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    ExactComplex conj() const { return {re, -im}; }
    Rational abs2() const { return re * re + im * im; }

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

    friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }

    friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend ExactComplex operator-(const ExactComplex& a) { return {-a.re, -a.im}; }
    friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ExactComplex operator*(const Rational& s, const ExactComplex& a) {
        return {s * a.re, s * a.im};
    }
    friend ExactComplex operator/(const ExactComplex& a, const ExactComplex& b);
};

ExactComplex exact_complex_pow(const ExactComplex& base, unsigned long exponent);

// Deterministic ordering for canonical output (lexicographic on re, then im).
bool exact_complex_less(const ExactComplex& a, const ExactComplex& b);

std::string exact_complex_to_string(const ExactComplex& value);

// Parses "a+bi" style complex literals where a, b are rationals or decimals
// ("0.5+0i", "1/2-3/4i", "2", "i", "-i").
ExactComplex exact_complex_from_string(const std::string& text);

}  // namespace gzspec
