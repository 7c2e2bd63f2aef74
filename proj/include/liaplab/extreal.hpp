#ifndef LIAPLAB_EXTREAL_HPP
#define LIAPLAB_EXTREAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace liaplab {

/// Tagged extended real. Declared bounds (sup g, sigma_M, rho, ...) may be
/// infinite; formulas must branch on finiteness explicitly instead of feeding
/// IEEE infinities into expressions like r_M or delta_M.
class ExtReal {
  public:
    ExtReal() : tag_(Tag::Finite), v_(0.0) {}

    static ExtReal finite(double v)
    {
        if (!std::isfinite(v))
            throw std::invalid_argument("ExtReal::finite: non-finite value");
        ExtReal e;
        e.v_ = v;
        return e;
    }
    static ExtReal pos_inf()
    {
        ExtReal e;
        e.tag_ = Tag::PosInf;
        return e;
    }
    static ExtReal neg_inf()
    {
        ExtReal e;
        e.tag_ = Tag::NegInf;
        return e;
    }
    /// Maps IEEE +/-inf onto the tags; finite doubles stay finite.
    static ExtReal of(double v)
    {
        if (std::isinf(v))
            return v > 0 ? pos_inf() : neg_inf();
        return finite(v);
    }

    bool is_finite() const { return tag_ == Tag::Finite; }
    bool is_pos_inf() const { return tag_ == Tag::PosInf; }
    bool is_neg_inf() const { return tag_ == Tag::NegInf; }

    /// Finite value; throws if infinite (name the consumer in `who`).
    double value(const char* who = "ExtReal::value") const
    {
        if (!is_finite())
            throw std::logic_error(std::string(who) + ": bound is infinite");
        return v_;
    }

    /// IEEE view, for comparisons and reports only.
    double as_double() const
    {
        switch (tag_) {
        case Tag::PosInf: return std::numeric_limits<double>::infinity();
        case Tag::NegInf: return -std::numeric_limits<double>::infinity();
        default: return v_;
        }
    }

    friend bool operator==(const ExtReal& a, const ExtReal& b)
    {
        return a.tag_ == b.tag_ && (a.tag_ != Tag::Finite || a.v_ == b.v_);
    }
    friend bool operator<(const ExtReal& a, const ExtReal& b)
    {
        return a.as_double() < b.as_double();
    }

    std::string str() const
    {
        if (is_pos_inf())
            return "inf";
        if (is_neg_inf())
            return "-inf";
        return std::to_string(v_);
    }

  private:
    enum class Tag { Finite, PosInf, NegInf };
    Tag tag_;
    double v_ = 0.0;
};

} // namespace liaplab

#endif
