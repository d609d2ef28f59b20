#pragma once

#include <iosfwd>
#include <vector>

#include "hullforge/common.hpp"

namespace hullforge {

// Per-dimension min-max scaler to [0, 1]. Constant dimensions map to
// 0.5 and invert back to their original value.
class Normalizer {
public:
    Normalizer() = default;

    static Normalizer fit(const Matrix& data); // throws EmptyDataError for n < 2

    std::size_t dim() const { return lo_.size(); }

    void apply(std::span<const double> x, std::span<double> out) const;
    void invert(std::span<const double> x, std::span<double> out) const;
    Matrix apply(const Matrix& data) const;
    Matrix invert(const Matrix& data) const;

    double lo(std::size_t d) const { return lo_[d]; }
    double hi(std::size_t d) const { return hi_[d]; }

    void write(std::ostream& os) const;
    static Normalizer read(std::istream& is);

private:
    std::vector<double> lo_, hi_;
};

} // namespace hullforge
