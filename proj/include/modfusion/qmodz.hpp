#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include "modfusion/errors.hpp"
#include "modfusion/intmat.hpp"

namespace modfusion {

/// Exact rational modulo 1, reduced to the unique representative
/// num/den in [0, 1). Models roots of unity written additively; the
/// additive order of p/q is q. No floating point anywhere.
class QmodZ {
public:
    QmodZ() = default;

    static QmodZ fraction(std::int64_t num, std::int64_t den)
    {
        if (den == 0)
            throw invalid_input_error("rational with zero denominator");
        if (den < 0) {
            num = checked_neg(num);
            den = checked_neg(den);
        }
        num = ((num % den) + den) % den;
        const std::int64_t g = std::gcd(num, den);
        QmodZ q;
        q.num_ = num / g;
        q.den_ = den / g;
        return q;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    std::int64_t additive_order() const { return den_; }

    QmodZ operator+(const QmodZ& o) const
    {
        const std::int64_t d = checked_mul(den_ / std::gcd(den_, o.den_), o.den_);
        return fraction(checked_add(checked_mul(num_, d / den_), checked_mul(o.num_, d / o.den_)), d);
    }

    QmodZ operator-() const { return fraction(checked_neg(num_), den_); }

    QmodZ operator-(const QmodZ& o) const { return *this + (-o); }

    QmodZ times(std::int64_t k) const { return fraction(checked_mul(k % den_, num_), den_); }

    bool operator==(const QmodZ&) const = default;

    std::strong_ordering operator<=>(const QmodZ& o) const
    {
        return checked_mul(num_, o.den_) <=> checked_mul(o.num_, den_);
    }

    std::string str() const
    {
        if (num_ == 0)
            return "0";
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parse "p/q" or a bare integer; the value is reduced mod 1.
    static QmodZ parse(const std::string& text)
    {
        const auto bad = [&] { return invalid_input_error("cannot parse rational '" + text + "'"); };
        if (text.empty())
            throw bad();
        const std::size_t slash = text.find('/');
        const auto parse_int = [&](const std::string& part) {
            if (part.empty())
                throw bad();
            std::size_t start = part[0] == '-' || part[0] == '+' ? 1 : 0;
            if (start == part.size())
                throw bad();
            for (std::size_t i = start; i < part.size(); ++i)
                if (part[i] < '0' || part[i] > '9')
                    throw bad();
            try {
                return static_cast<std::int64_t>(std::stoll(part));
            } catch (const std::exception&) {
                throw bad();
            }
        };
        const std::int64_t num = parse_int(slash == std::string::npos ? text : text.substr(0, slash));
        const std::int64_t den = slash == std::string::npos ? 1 : parse_int(text.substr(slash + 1));
        if (den == 0)
            throw invalid_input_error("zero denominator in rational '" + text + "'");
        return fraction(num, den);
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace modfusion
