#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grk {

// Exact rational score. Reward constants are small decimals and step means
// divide by the step count, so int64 numerators never come close to overflow.
class Score {
public:
    constexpr Score() : num_(0), den_(1) {}
    constexpr Score(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Score: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        normalize();
    }

    // Rounds to four decimal places; used when reading config overrides from JSON.
    static Score from_double(double v) {
        auto scaled = static_cast<std::int64_t>(v < 0 ? v * 10000.0 - 0.5 : v * 10000.0 + 0.5);
        return Score(scaled, 10000);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Score operator+(const Score& o) const { return Score(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
    Score operator-(const Score& o) const { return Score(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
    Score operator-() const { return Score(-num_, den_); }
    Score operator/(std::int64_t k) const { return Score(num_, den_ * k); }
    Score& operator+=(const Score& o) { *this = *this + o; return *this; }

    bool operator==(const Score& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Score& o) const { return !(*this == o); }
    bool operator<(const Score& o) const { return num_ * o.den_ < o.num_ * den_; }
    bool operator>(const Score& o) const { return o < *this; }
    bool operator<=(const Score& o) const { return !(o < *this); }
    bool operator>=(const Score& o) const { return !(*this < o); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    constexpr void normalize() {
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_;
    std::int64_t den_;
};

}  // namespace grk
