#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cadlag {

/// Default number of fractional bits used when snapping real-valued times.
inline constexpr int kDefaultTimePrecision = 40;

/**
 * DyadicTime: an exact time instant of the form mantissa * 2^-shift.
 *
 * Values are kept normalized (shift == 0 or mantissa odd), so equality of
 * representations is equality of values. All arithmetic is exact; results
 * that do not fit the 64-bit mantissa throw std::overflow_error.
 */
class DyadicTime {
public:
    static constexpr int kMaxShift = 62;

    constexpr DyadicTime() = default;

    static DyadicTime integer(std::int64_t value) { return DyadicTime(value, 0); }

    /// mantissa * 2^-shift, shift in [0, kMaxShift].
    static DyadicTime dyadic(std::int64_t mantissa, int shift) {
        if (shift < 0 || shift > kMaxShift) {
            throw std::invalid_argument("dyadic shift out of range: " + std::to_string(shift));
        }
        return DyadicTime(mantissa, shift);
    }

    /// mantissa * 2^exponent (the serialized [mantissa, exponent] pair).
    static DyadicTime from_pair(std::int64_t mantissa, int exponent) {
        if (exponent <= 0) return dyadic(mantissa, -exponent);
        if (exponent >= 63) throw std::overflow_error("dyadic exponent too large");
        return from_wide(static_cast<__int128>(mantissa) << exponent, 0);
    }

    /// Round a real number to the nearest multiple of 2^-precision_bits.
    static DyadicTime from_double(double x, int precision_bits = kDefaultTimePrecision) {
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite time value");
        if (precision_bits < 0 || precision_bits > kMaxShift) {
            throw std::invalid_argument("time precision out of range");
        }
        const long double scaled = std::ldexp(static_cast<long double>(x), precision_bits);
        if (std::fabs(scaled) >= 9.2e18L) throw std::overflow_error("time value too large for precision");
        return DyadicTime(static_cast<std::int64_t>(std::llround(scaled)), precision_bits);
    }

    std::int64_t mantissa() const { return mantissa_; }
    int shift() const { return shift_; }
    int exponent() const { return -shift_; }

    double to_double() const { return std::ldexp(static_cast<double>(mantissa_), -shift_); }

    friend bool operator==(const DyadicTime&, const DyadicTime&) = default;

    friend std::strong_ordering operator<=>(const DyadicTime& a, const DyadicTime& b) {
        const int s = a.shift_ > b.shift_ ? a.shift_ : b.shift_;
        const __int128 x = static_cast<__int128>(a.mantissa_) << (s - a.shift_);
        const __int128 y = static_cast<__int128>(b.mantissa_) << (s - b.shift_);
        return x <=> y;
    }

    friend DyadicTime operator+(const DyadicTime& a, const DyadicTime& b) {
        const int s = a.shift_ > b.shift_ ? a.shift_ : b.shift_;
        return from_wide((static_cast<__int128>(a.mantissa_) << (s - a.shift_)) +
                             (static_cast<__int128>(b.mantissa_) << (s - b.shift_)),
                         s);
    }

    friend DyadicTime operator-(const DyadicTime& a, const DyadicTime& b) {
        const int s = a.shift_ > b.shift_ ? a.shift_ : b.shift_;
        return from_wide((static_cast<__int128>(a.mantissa_) << (s - a.shift_)) -
                             (static_cast<__int128>(b.mantissa_) << (s - b.shift_)),
                         s);
    }

    DyadicTime operator-() const { return from_wide(-static_cast<__int128>(mantissa_), shift_); }

    /// this * 2^-k (k >= 0)
    DyadicTime halved(int k = 1) const {
        if (k < 0) throw std::invalid_argument("negative halving count");
        return from_wide(mantissa_, shift_ + k);
    }

    /// this * n for an integer n
    DyadicTime times(std::int64_t n) const {
        return from_wide(static_cast<__int128>(mantissa_) * n, shift_);
    }

    bool is_zero() const { return mantissa_ == 0; }

    std::string to_string() const {
        if (shift_ == 0) return std::to_string(mantissa_);
        return std::to_string(mantissa_) + "/2^" + std::to_string(shift_);
    }

    friend std::ostream& operator<<(std::ostream& os, const DyadicTime& t) {
        return os << t.to_double();
    }

private:
    constexpr DyadicTime(std::int64_t mantissa, int shift) : mantissa_(mantissa), shift_(shift) {
        normalize();
    }

    static DyadicTime from_wide(__int128 mantissa, int shift) {
        while (shift > 0 && (mantissa & 1) == 0) {
            mantissa >>= 1;
            --shift;
        }
        if (shift > kMaxShift) throw std::overflow_error("dyadic precision exceeded");
        if (mantissa > std::numeric_limits<std::int64_t>::max() ||
            mantissa < std::numeric_limits<std::int64_t>::min()) {
            throw std::overflow_error("dyadic mantissa overflow");
        }
        DyadicTime t;
        t.mantissa_ = static_cast<std::int64_t>(mantissa);
        t.shift_ = shift;
        return t;
    }

    constexpr void normalize() {
        if (mantissa_ == 0) {
            shift_ = 0;
            return;
        }
        while (shift_ > 0 && (mantissa_ & 1) == 0) {
            mantissa_ >>= 1;
            --shift_;
        }
    }

    std::int64_t mantissa_ = 0;
    int shift_ = 0;
};

/// Length of [a, b] as a double (exact when it fits 53 bits).
inline double span_length(const DyadicTime& a, const DyadicTime& b) { return (b - a).to_double(); }

}  // namespace cadlag
