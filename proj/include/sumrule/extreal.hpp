#ifndef SUMRULE_EXTREAL_HPP
#define SUMRULE_EXTREAL_HPP

#include <stdexcept>

namespace sumrule {

/// A value on the extended real line [finite, +inf). Rate functions and
/// entropy functionals return this instead of encoding +inf as a large float.
class ExtReal {
public:
    ExtReal() : value_(0.0), infinite_(false) {}
    ExtReal(double v) : value_(v), infinite_(false) {}

    static ExtReal infinity() {
        ExtReal r;
        r.infinite_ = true;
        return r;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    double value() const {
        if (infinite_) throw std::logic_error("ExtReal: value() on infinite");
        return value_;
    }

    /// Finite value, or `fallback` when infinite (for reports/serialization).
    double value_or(double fallback) const { return infinite_ ? fallback : value_; }

    ExtReal operator+(const ExtReal& o) const {
        if (infinite_ || o.infinite_) return infinity();
        return ExtReal(value_ + o.value_);
    }
    ExtReal& operator+=(const ExtReal& o) {
        *this = *this + o;
        return *this;
    }

private:
    double value_;
    bool infinite_;
};

} // namespace sumrule

#endif
