#pragma once

#include "diffops.hpp"

#include <cctype>

namespace lgha {

/// Parser for the operator DSL. Every factor is an operator and '*' is
/// composition, so a coefficient written left of a derivative multiplies it:
///
///   op     := term { ('+' | '-') term }
///   term   := { '-' } factor { '*' factor }
///   factor := atom [ '^' integer ]
///   atom   := number | 'i' | 'x' | 'y' | 'z' | 'dx' | 'dy' | 'dz' | '(' op ')'
///   number := digits [ '.' digits ] [ '/' digits ]
class OpParser {
public:
    explicit OpParser(std::string text) : s_(std::move(text)) {}

    PolyDiffOp parse()
    {
        PolyDiffOp r = parse_op();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("operator DSL: " + what + " at offset " + std::to_string(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    PolyDiffOp parse_op()
    {
        PolyDiffOp r = parse_term();
        for (;;) {
            if (eat('+')) r += parse_term();
            else if (eat('-')) r -= parse_term();
            else return r;
        }
    }

    PolyDiffOp parse_term()
    {
        bool neg = false;
        while (eat('-')) neg = !neg;
        PolyDiffOp r = parse_factor();
        while (eat('*')) r = r * parse_factor();
        return neg ? -r : r;
    }

    PolyDiffOp parse_factor()
    {
        PolyDiffOp a = parse_atom();
        if (eat('^')) {
            skip();
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected exponent");
            const int n = std::stoi(s_.substr(start, pos_ - start));
            if (n > 8) fail("exponent too large");
            a = a.pow(n);
        }
        return a;
    }

    long long digits()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected digits");
        if (pos_ - start > 15) fail("number too long");
        return std::stoll(s_.substr(start, pos_ - start));
    }

    PolyDiffOp parse_atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            PolyDiffOp r = parse_op();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rat v(digits());
            if (pos_ < s_.size() && s_[pos_] == '.') {
                ++pos_;
                const std::size_t start = pos_;
                const long long frac = digits();
                long long scale = 1;
                for (std::size_t k = start; k < pos_; ++k) scale *= 10;
                v += Rat(frac, scale);
            }
            if (pos_ < s_.size() && s_[pos_] == '/') {
                ++pos_;
                const long long d = digits();
                if (d == 0) fail("division by zero");
                v /= d;
            }
            return Poly(CRational(v)) * PolyDiffOp::identity();
        }
        if (c == 'd' && pos_ + 1 < s_.size()) {
            const char v = s_[pos_ + 1];
            if (v == 'x' || v == 'y' || v == 'z') {
                pos_ += 2;
                return v == 'x' ? PolyDiffOp::dx() : v == 'y' ? PolyDiffOp::dy() : PolyDiffOp::dz();
            }
        }
        ++pos_;
        switch (c) {
        case 'i': return CRational::i() * PolyDiffOp::identity();
        case 'x': return Poly::x() * PolyDiffOp::identity();
        case 'y': return Poly::y() * PolyDiffOp::identity();
        case 'z': return Poly::z() * PolyDiffOp::identity();
        default: --pos_; fail("unexpected '" + std::string(1, c) + "'");
        }
    }

    std::string s_;
    std::size_t pos_ = 0;
};

inline PolyDiffOp parse_op(const std::string& text) { return OpParser(text).parse(); }

/// Named operators available to the CLI by identifier.
inline std::vector<std::pair<std::string, PolyDiffOp>> named_operators()
{
    using namespace ops;
    return {{"L", lewy()},
            {"L_star", lewy_star()},
            {"L_complex", lewy_complex_form()},
            {"L_conj", lewy_conjugate()},
            {"Q", cauchy_riemann()},
            {"Q_star", cauchy_riemann_star()},
            {"Delta", laplace2()},
            {"Delta3", laplace3()},
            {"bracketed", bracketed_product()},
            {"gamma_first", gamma_first_order()},
            {"gamma_second", gamma_second_order()},
            {"sublaplacian", sublaplacian()},
            {"sublaplacian_shifted", sublaplacian_shifted()},
            {"X2_Y2", sum_of_squares()},
            {"X2_Y2_Z2", sum_of_squares_z()},
            {"Delta_h1", laplace_h1()},
            {"Delta_h2", laplace_h2()},
            {"R", cr_R()},
            {"R_star", cr_R_star()},
            {"P", hormander_P()},
            {"Pbar", hormander_Pbar()},
            {"QxD", hormander_Q()},
            {"X_iY_4iZ", x_iy_4iz()}};
}

} // namespace lgha
