// SPDX-License-Identifier: Apache-2.0
#include "gzspec/rational.hpp"

#include <cctype>
#include <cmath>

namespace gzspec {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse_error: return "parse-error";
        case ErrorCode::malformed_selection: return "malformed-selection";
        case ErrorCode::invalid_spectral_set: return "invalid-spectral-set";
        case ErrorCode::depth_overflow: return "depth-overflow";
        case ErrorCode::unsupported_spectral_shape: return "unsupported-spectral-shape";
        case ErrorCode::not_semi_fredholm: return "not-semi-fredholm";
        case ErrorCode::contour_too_close: return "contour-too-close";
        case ErrorCode::no_convergence: return "no-convergence";
        case ErrorCode::no_separating_contour: return "no-separating-contour";
        case ErrorCode::conditioning: return "conditioning";
        case ErrorCode::invalid_projection: return "invalid-projection";
        case ErrorCode::degenerate_restriction: return "degenerate-restriction";
        case ErrorCode::undefined_gamma: return "undefined-gamma";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

Rational make_rational(long num, long den) {
    if (den == 0) raise(ErrorCode::invalid_argument, "rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational rational_from_string(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (!s.empty() && s.front() == '+') s.erase(s.begin());
    if (s.empty()) raise(ErrorCode::parse_error, "empty rational literal");

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        // finite decimal: digits.digits -> integer / 10^k
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            raise(ErrorCode::parse_error, "bad decimal literal: " + text);
        mpz_class num;
        if (num.set_str(digits, 10) != 0)
            raise(ErrorCode::parse_error, "bad decimal literal: " + text);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    Rational q;
    if (q.set_str(s, 10) != 0 || sgn(q.get_den()) == 0)
        raise(ErrorCode::parse_error, "bad rational literal: " + text);
    if (q.get_den() < 0) {
        q = Rational(-q.get_num(), -q.get_den());
    }
    q.canonicalize();
    return q;
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) raise(ErrorCode::parse_error, "non-finite value");
    Rational q(value);
    q.canonicalize();
    return q;
}

std::string rational_to_string(const Rational& value) {
    if (value.get_den() == 1) return value.get_num().get_str();
    return value.get_str();
}

Rational sqrt_lower(const Rational& value) {
    if (sgn(value) < 0) raise(ErrorCode::invalid_argument, "sqrt of negative rational");
    if (sgn(value) == 0) return Rational(0);
    // floor(sqrt(num)) / ceil(sqrt(den)) <= sqrt(num/den)
    mpz_class num_root, den_root, rem;
    mpz_sqrtrem(num_root.get_mpz_t(), rem.get_mpz_t(), value.get_num().get_mpz_t());
    mpz_sqrtrem(den_root.get_mpz_t(), rem.get_mpz_t(), value.get_den().get_mpz_t());
    if (rem != 0) den_root += 1;
    Rational q(num_root, den_root);
    q.canonicalize();
    return q;
}

Rational sqrt_upper(const Rational& value) {
    if (sgn(value) < 0) raise(ErrorCode::invalid_argument, "sqrt of negative rational");
    if (sgn(value) == 0) return Rational(0);
    mpz_class num_root, den_root, rem;
    mpz_sqrtrem(num_root.get_mpz_t(), rem.get_mpz_t(), value.get_num().get_mpz_t());
    if (rem != 0) num_root += 1;
    mpz_sqrtrem(den_root.get_mpz_t(), rem.get_mpz_t(), value.get_den().get_mpz_t());
    Rational q(num_root, den_root);
    q.canonicalize();
    return q;
}

Rational pow_rational(const Rational& base, unsigned long exponent) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), exponent);
    Rational q(num, den);
    q.canonicalize();
    return q;
}

ExactComplex operator/(const ExactComplex& a, const ExactComplex& b) {
    Rational d = b.abs2();
    if (sgn(d) == 0) raise(ErrorCode::invalid_argument, "exact complex division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

ExactComplex exact_complex_pow(const ExactComplex& base, unsigned long exponent) {
    ExactComplex result(1, 0);
    ExactComplex acc = base;
    unsigned long e = exponent;
    while (e > 0) {
        if (e & 1UL) result = result * acc;
        e >>= 1UL;
        if (e > 0) acc = acc * acc;
    }
    return result;
}

bool exact_complex_less(const ExactComplex& a, const ExactComplex& b) {
    int c = cmp(a.re, b.re);
    if (c != 0) return c < 0;
    return cmp(a.im, b.im) < 0;
}

std::string exact_complex_to_string(const ExactComplex& value) {
    if (value.is_real()) return rational_to_string(value.re);
    std::string out = rational_to_string(value.re);
    if (sgn(value.im) >= 0) out += "+";
    out += rational_to_string(value.im) + "i";
    return out;
}

ExactComplex exact_complex_from_string(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) raise(ErrorCode::parse_error, "empty complex literal");

    bool has_i = !s.empty() && (s.back() == 'i' || s.back() == 'I');
    if (!has_i) return {rational_from_string(s), Rational(0)};

    s.pop_back();  // strip the i
    // Split at the last top-level +/- that is not a leading sign.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != '/' && s[k - 1] != '+' && s[k - 1] != '-') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) {
        // pure imaginary: "i", "-i", "2i", "1/2i"
        if (s.empty() || s == "+") return {Rational(0), Rational(1)};
        if (s == "-") return {Rational(0), Rational(-1)};
        return {Rational(0), rational_from_string(s)};
    }
    std::string re_part = s.substr(0, split);
    std::string im_part = s.substr(split);
    if (im_part == "+") im_part = "1";
    if (im_part == "-") im_part = "-1";
    return {rational_from_string(re_part), rational_from_string(im_part)};
}

}  // namespace gzspec
