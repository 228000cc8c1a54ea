#pragma once

#include "core.hpp"

#include <boost/rational.hpp>

#include <map>
#include <sstream>

namespace lgha {

using Rat = boost::rational<long long>;

/// Gaussian rational a + b i.
struct CRational {
    Rat re{0}, im{0};

    CRational() = default;
    CRational(Rat r) : re(r) {}
    CRational(long long r) : re(r) {}
    CRational(Rat r, Rat i) : re(r), im(i) {}

    static CRational i() { return {Rat(0), Rat(1)}; }

    bool is_zero() const { return re.numerator() == 0 && im.numerator() == 0; }
    cplx value() const { return {boost::rational_cast<double>(re), boost::rational_cast<double>(im)}; }
    CRational conj() const { return {re, -im}; }

    CRational operator-() const { return {-re, -im}; }
    CRational& operator+=(const CRational& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    CRational& operator-=(const CRational& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend CRational operator+(CRational a, const CRational& b) { return a += b; }
    friend CRational operator-(CRational a, const CRational& b) { return a -= b; }
    friend CRational operator*(const CRational& a, const CRational& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const CRational& a, const CRational& b) { return a.re == b.re && a.im == b.im; }
};

inline std::string rat_string(const Rat& r)
{
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Exponents of (z, y, x).
using Mono = std::array<int, 3>;

inline constexpr std::array<const char*, 3> coord_names{"z", "y", "x"};

inline int mono_degree(const Mono& m) { return m[0] + m[1] + m[2]; }

/// Polynomial in (z, y, x) with Gaussian-rational coefficients.
class Poly {
public:
    Poly() = default;
    Poly(CRational c)
    {
        if (!c.is_zero()) terms_[{0, 0, 0}] = c;
    }
    Poly(long long c) : Poly(CRational(c)) {}

    static Poly var(int k)
    {
        Mono m{0, 0, 0};
        m[k] = 1;
        Poly p;
        p.terms_[m] = CRational(1);
        return p;
    }
    static Poly z() { return var(0); }
    static Poly y() { return var(1); }
    static Poly x() { return var(2); }
    static Poly monomial(const Mono& m, CRational c)
    {
        Poly p;
        if (!c.is_zero()) p.terms_[m] = c;
        return p;
    }

    const std::map<Mono, CRational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Mono{0, 0, 0}); }

    CRational constant() const
    {
        const auto it = terms_.find({0, 0, 0});
        return it == terms_.end() ? CRational{} : it->second;
    }

    bool is_real() const
    {
        for (const auto& [m, c] : terms_)
            if (c.im.numerator() != 0) return false;
        return true;
    }

    int degree() const
    {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, mono_degree(m));
        return d;
    }

    Poly operator-() const
    {
        Poly r = *this;
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }
    Poly& operator+=(const Poly& o)
    {
        for (const auto& [m, c] : o.terms_) add(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o)
    {
        for (const auto& [m, c] : o.terms_) add(m, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b)
    {
        Poly r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add({ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, ca * cb);
        return r;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

    Poly pow(int n) const
    {
        Poly r(1);
        for (int k = 0; k < n; ++k) r = r * *this;
        return r;
    }

    /// Partial derivative in coordinate k (0 = z, 1 = y, 2 = x).
    Poly diff(int k) const
    {
        Poly r;
        for (const auto& [m, c] : terms_) {
            if (m[k] == 0) continue;
            Mono d = m;
            --d[k];
            r.add(d, c * CRational(m[k]));
        }
        return r;
    }

    Poly diff(const Mono& alpha) const
    {
        Poly r = *this;
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < alpha[k]; ++j) r = r.diff(k);
        return r;
    }

    cplx operator()(const std::array<double, 3>& p) const
    {
        cplx s = 0.0;
        for (const auto& [m, c] : terms_) {
            double v = 1.0;
            for (int k = 0; k < 3; ++k) v *= std::pow(p[k], m[k]);
            s += c.value() * v;
        }
        return s;
    }

    double real_at(const std::array<double, 3>& p) const { return (*this)(p).real(); }

    /// Substitutes (z, y, x) -> (s[0], s[1], s[2]).
    Poly substitute(const std::array<Poly, 3>& s) const
    {
        Poly r;
        for (const auto& [m, c] : terms_) {
            Poly t(c);
            for (int k = 0; k < 3; ++k) t = t * s[k].pow(m[k]);
            r += t;
        }
        return r;
    }

    std::string str() const;

private:
    void add(const Mono& m, const CRational& c)
    {
        auto& slot = terms_[m];
        slot += c;
        if (slot.is_zero()) terms_.erase(m);
    }

    std::map<Mono, CRational> terms_;
};

inline Poly operator*(const CRational& c, const Poly& p) { return Poly(c) * p; }

/// Canonical coefficient text: 2, -1/2, i, -3*i, (1+2*i).
inline std::string crational_string(const CRational& c)
{
    if (c.im.numerator() == 0) return rat_string(c.re);
    auto imag = [](const Rat& r) {
        if (r == Rat(1)) return std::string("i");
        if (r == Rat(-1)) return std::string("-i");
        return rat_string(r) + "*i";
    };
    if (c.re.numerator() == 0) return imag(c.im);
    std::string s = rat_string(c.re);
    const std::string t = imag(c.im);
    s += t[0] == '-' ? t : "+" + t;
    return "(" + s + ")";
}

inline std::string mono_string(const Mono& m)
{
    std::string s;
    for (int k = 0; k < 3; ++k) {
        if (m[k] == 0) continue;
        if (!s.empty()) s += "*";
        s += coord_names[k];
        if (m[k] > 1) s += "^" + std::to_string(m[k]);
    }
    return s;
}

inline std::string Poly::str() const
{
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        const std::string ms = mono_string(m);
        std::string t;
        if (ms.empty()) t = crational_string(c);
        else if (c == CRational(1)) t = ms;
        else if (c == CRational(-1)) t = "-" + ms;
        else t = crational_string(c) + "*" + ms;
        if (s.empty()) s = t;
        else s += t[0] == '-' ? t : "+" + t;
    }
    return s;
}

} // namespace lgha
