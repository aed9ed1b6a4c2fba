#pragma once

// Exact arithmetic support: arbitrary-precision rationals (GMP-backed),
// continued-fraction reconstruction of near-rational doubles, and a small
// quadratic-extension type Q(sqrt(d)) used for closed-form catalog values.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patlag {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Formats a rational as "num/den" ("num" when the denominator is 1).
inline std::string fraction_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "num/den" or a bare integer. Returns nullopt on malformed input.
inline std::optional<Rational> parse_fraction(std::string_view s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) {
            mpz_class n{std::string(s)};
            return Rational(n);
        }
        mpz_class n{std::string(s.substr(0, slash))};
        mpz_class d{std::string(s.substr(slash + 1))};
        if (d == 0) return std::nullopt;
        Rational q(n, d);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

inline Rational pow_rational(const Rational& base, unsigned e) {
    Rational out(1);
    for (unsigned i = 0; i < e; ++i) out *= base;
    return out;
}

inline Rational factorial_rational(unsigned m) {
    Rational out(1);
    for (unsigned i = 2; i <= m; ++i) out *= Rational(static_cast<long>(i));
    return out;
}

/// Best rational p/q with q <= max_den approximating x, via the continued
/// fraction of x (convergents plus the final semiconvergent admitted by the
/// denominator bound). Returns nullopt unless |x - p/q| <= tol.
inline std::optional<Rational> rational_reconstruct(double x, std::uint64_t max_den,
                                                    double tol) {
    if (!std::isfinite(x) || max_den == 0) return std::nullopt;
    const bool neg = x < 0;
    const double ax = std::fabs(x);

    auto accept = [&](std::uint64_t p, std::uint64_t q) -> std::optional<Rational> {
        if (q == 0 || q > max_den) return std::nullopt;
        if (std::fabs(ax - static_cast<double>(p) / static_cast<double>(q)) > tol)
            return std::nullopt;
        Rational r(mpz_class(static_cast<unsigned long>(p)),
                   mpz_class(static_cast<unsigned long>(q)));
        r.canonicalize();
        return neg ? Rational(-r) : r;
    };

    // Convergents p_k/q_k of ax. Loop state holds the last two.
    std::uint64_t p0 = 1, q0 = 0;
    std::uint64_t p1 = static_cast<std::uint64_t>(std::floor(ax)), q1 = 1;
    double rem = ax - std::floor(ax);
    if (auto r = accept(p1, q1)) return r;

    for (int it = 0; it < 64; ++it) {
        if (rem < 1e-18) break;
        const double inv = 1.0 / rem;
        if (inv > 9e15) break;  // term no longer trustworthy in binary64
        const std::uint64_t a = static_cast<std::uint64_t>(std::floor(inv));
        rem = inv - std::floor(inv);

        const unsigned __int128 p2w =
            static_cast<unsigned __int128>(a) * p1 + p0;
        const unsigned __int128 q2w =
            static_cast<unsigned __int128>(a) * q1 + q0;
        if (q2w > max_den) {
            // Largest semiconvergent still under the bound.
            const std::uint64_t t = (max_den - q0) / q1;
            if (t > 0) {
                if (auto r = accept(p0 + t * p1, q0 + t * q1)) return r;
            }
            return std::nullopt;
        }
        p0 = p1;
        q0 = q1;
        p1 = static_cast<std::uint64_t>(p2w);
        q1 = static_cast<std::uint64_t>(q2w);
        if (auto r = accept(p1, q1)) return r;
    }
    return accept(p1, q1);
}

/// Element of Q(sqrt(d)): value a + b*sqrt(d) with rational a, b and a
/// nonnegative integer radicand d. Perfect-square radicands collapse to plain
/// rationals on construction, so is_rational()/operator== are exact.
template <typename Q = Rational>
struct QuadExt {
    Q a{};
    Q b{};
    long d = 0;

    QuadExt() = default;
    QuadExt(const Q& rational_part) : a(rational_part) {}  // NOLINT(google-explicit-constructor)
    QuadExt(long v) : a(Q(v)) {}                           // NOLINT(google-explicit-constructor)
    QuadExt(Q a_, Q b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {
        if (d < 0) throw std::invalid_argument("QuadExt: negative radicand");
        normalize();
    }

    bool is_rational() const { return b == 0; }

    /// Nearest-double view. Rationalized denominators can make a and b large
    /// with opposite signs, so the sum is formed at 128-bit precision before
    /// the final rounding.
    double value() const {
        mpf_class acc(a, 128);
        if (b != 0) {
            mpf_class root(static_cast<unsigned long>(d), 128);
            acc += mpf_class(b, 128) * sqrt(root);
        }
        return acc.get_d();
    }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        const long dd = joint_radicand(x, y);
        return QuadExt(x.a + y.a, x.b + y.b, dd);
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        const long dd = joint_radicand(x, y);
        return QuadExt(x.a - y.a, x.b - y.b, dd);
    }
    friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a, -x.b, x.d); }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        const long dd = joint_radicand(x, y);
        return QuadExt(x.a * y.a + x.b * y.b * Q(dd), x.a * y.b + x.b * y.a, dd);
    }
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y) {
        const long dd = joint_radicand(x, y);
        const Q norm = y.a * y.a - y.b * y.b * Q(dd);
        if (norm == 0) throw std::domain_error("QuadExt: division by zero");
        // Multiply by the conjugate (y.a - y.b sqrt(d)) / norm.
        return QuadExt((x.a * y.a - x.b * y.b * Q(dd)) / norm,
                       (x.b * y.a - x.a * y.b) / norm, dd);
    }
    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        if (x.b == 0 && y.b == 0) return x.a == y.a;
        return x.a == y.a && x.b == y.b && x.d == y.d;
    }
    friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }

  private:
    void normalize() {
        if (b == 0) {
            d = 0;
            return;
        }
        const long root = static_cast<long>(std::llround(std::sqrt(static_cast<double>(d))));
        if (root >= 0 && root * root == d) {
            a += b * Q(root);
            b = 0;
            d = 0;
        }
    }

    static long joint_radicand(const QuadExt& x, const QuadExt& y) {
        if (x.b == 0) return y.d;
        if (y.b == 0) return x.d;
        if (x.d != y.d)
            throw std::invalid_argument("QuadExt: mixed radicands");
        return x.d;
    }
};

using QR = QuadExt<Rational>;

}  // namespace patlag
