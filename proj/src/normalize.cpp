#include "hullforge/normalize.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "hullforge/errors.hpp"

namespace hullforge {

Normalizer Normalizer::fit(const Matrix& data) {
    if (data.rows < 2) throw EmptyDataError("normalizer needs at least 2 rows");
    Normalizer n;
    n.lo_.assign(data.cols, 0.0);
    n.hi_.assign(data.cols, 0.0);
    for (std::size_t d = 0; d < data.cols; ++d) {
        double lo = data(0, d), hi = data(0, d);
        for (std::size_t r = 0; r < data.rows; ++r) {
            const double v = data(r, d);
            // min/max would silently drop NaN, so test each value directly.
            if (!std::isfinite(v)) {
                throw NonFiniteError("column " + std::to_string(d) + " has non-finite values");
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        n.lo_[d] = lo;
        n.hi_[d] = hi;
    }
    return n;
}

void Normalizer::apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t d = 0; d < lo_.size(); ++d) {
        const double range = hi_[d] - lo_[d];
        out[d] = range > 0.0 ? (x[d] - lo_[d]) / range : 0.5;
    }
}

void Normalizer::invert(std::span<const double> x, std::span<double> out) const {
    for (std::size_t d = 0; d < lo_.size(); ++d) {
        const double range = hi_[d] - lo_[d];
        out[d] = range > 0.0 ? lo_[d] + x[d] * range : lo_[d];
    }
}

Matrix Normalizer::apply(const Matrix& data) const {
    Matrix out(data.rows, data.cols);
    for (std::size_t r = 0; r < data.rows; ++r) apply(data.row(r), out.row(r));
    return out;
}

Matrix Normalizer::invert(const Matrix& data) const {
    Matrix out(data.rows, data.cols);
    for (std::size_t r = 0; r < data.rows; ++r) invert(data.row(r), out.row(r));
    return out;
}

void Normalizer::write(std::ostream& os) const {
    os << "normalizer " << lo_.size() << "\n";
    for (std::size_t d = 0; d < lo_.size(); ++d) {
        os << format_double(lo_[d]) << " " << format_double(hi_[d]) << "\n";
    }
}

Normalizer Normalizer::read(std::istream& is) {
    std::string tag;
    std::size_t dim = 0;
    if (!(is >> tag >> dim) || tag != "normalizer") {
        throw ParseError("expected 'normalizer <dim>' header");
    }
    Normalizer n;
    n.lo_.resize(dim);
    n.hi_.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        std::string a, b;
        if (!(is >> a >> b) || !parse_double(a, n.lo_[d]) || !parse_double(b, n.hi_[d])) {
            throw ParseError("bad normalizer bounds at dimension " + std::to_string(d));
        }
    }
    return n;
}

} // namespace hullforge
