#ifndef HAMM_SRC_EXPANSION_HPP
#define HAMM_SRC_EXPANSION_HPP

#include <cmath>
#include <vector>

// Error-free floating-point expansions (sum of non-overlapping doubles,
// increasing magnitude). Exact as long as nothing overflows or underflows.

namespace hamm::detail {

class Expansion {
public:
    Expansion() = default;
    explicit Expansion(double x) {
        if (x != 0.0)
            parts_.push_back(x);
    }

    Expansion& operator+=(double b) {
        std::vector<double> out;
        double q = b;
        for (double e : parts_) {
            const double s = q + e;
            const double bv = s - q;
            const double err = (q - (s - bv)) + (e - bv);
            if (err != 0.0)
                out.push_back(err);
            q = s;
        }
        if (q != 0.0)
            out.push_back(q);
        parts_ = std::move(out);
        return *this;
    }

    Expansion& operator+=(const Expansion& other) {
        for (double x : other.parts_)
            *this += x;
        return *this;
    }

    Expansion& operator-=(const Expansion& other) {
        for (double x : other.parts_)
            *this += -x;
        return *this;
    }

    Expansion operator*(double b) const {
        Expansion out;
        for (double e : parts_) {
            const double p = e * b;
            out += std::fma(e, b, -p);
            out += p;
        }
        return out;
    }

    Expansion operator*(const Expansion& other) const {
        Expansion out;
        for (double x : other.parts_)
            out += *this * x;
        return out;
    }

    // -1, 0 or 1.
    int sign() const {
        if (parts_.empty())
            return 0;
        return parts_.back() > 0.0 ? 1 : -1;
    }

private:
    std::vector<double> parts_;
};

} // namespace hamm::detail

#endif // HAMM_SRC_EXPANSION_HPP
