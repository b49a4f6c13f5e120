// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "jet.hpp"

namespace mpf {

struct parse_error : std::runtime_error
{
    std::size_t position;
    parse_error(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " at position " + std::to_string(pos)), position(pos)
    {}
};

struct domain_error : std::domain_error
{
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Expression tree
// ---------------------------------------------------------------------------

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node
{
    enum class Kind { constant, var_a, var_b, add, sub, mul, div, neg, pow };
    Kind kind;
    double value = 0;  // constant value or exponent
    NodePtr lhs, rhs;
};

namespace ex {

inline NodePtr make(Node::Kind k, double v = 0, NodePtr l = {}, NodePtr r = {})
{
    return std::make_shared<const Node>(Node{k, v, std::move(l), std::move(r)});
}
inline NodePtr constant(double v) { return make(Node::Kind::constant, v); }
inline NodePtr var_a() { return make(Node::Kind::var_a); }
inline NodePtr var_b() { return make(Node::Kind::var_b); }
inline NodePtr add(NodePtr l, NodePtr r) { return make(Node::Kind::add, 0, std::move(l), std::move(r)); }
inline NodePtr sub(NodePtr l, NodePtr r) { return make(Node::Kind::sub, 0, std::move(l), std::move(r)); }
inline NodePtr mul(NodePtr l, NodePtr r) { return make(Node::Kind::mul, 0, std::move(l), std::move(r)); }
inline NodePtr div(NodePtr l, NodePtr r) { return make(Node::Kind::div, 0, std::move(l), std::move(r)); }
inline NodePtr neg(NodePtr x) { return make(Node::Kind::neg, 0, std::move(x)); }
inline NodePtr pow(NodePtr x, double p) { return make(Node::Kind::pow, p, std::move(x)); }

inline bool is_integer_exponent(double p)
{
    return std::floor(p) == p && std::fabs(p) <= 1 << 20;
}

inline bool depends_on_ab(const Node& n)
{
    switch (n.kind) {
    case Node::Kind::var_a:
    case Node::Kind::var_b: return true;
    case Node::Kind::constant: return false;
    default:
        return (n.lhs && depends_on_ab(*n.lhs)) || (n.rhs && depends_on_ab(*n.rhs));
    }
}

/// Degree read off the exponents; empty when the tree is not visibly homogeneous.
inline std::optional<double> structural_degree(const Node& n)
{
    using K = Node::Kind;
    switch (n.kind) {
    case K::constant: return 0.0;
    case K::var_a:
    case K::var_b: return 1.0;
    case K::neg: return structural_degree(*n.lhs);
    case K::pow: {
        auto d = structural_degree(*n.lhs);
        if (!d) return std::nullopt;
        return *d * n.value;
    }
    case K::mul:
    case K::div: {
        auto l = structural_degree(*n.lhs), r = structural_degree(*n.rhs);
        if (!l || !r) return std::nullopt;
        return n.kind == K::mul ? *l + *r : *l - *r;
    }
    case K::add:
    case K::sub: {
        auto l = structural_degree(*n.lhs), r = structural_degree(*n.rhs);
        if (!l || !r || *l != *r) return std::nullopt;
        return l;
    }
    }
    return std::nullopt;
}

template <class T>
Jet2<T> eval(const Node& n, const T& a, const T& b)
{
    using K = Node::Kind;
    switch (n.kind) {
    case K::constant: return Jet2<T>::constant(T(n.value));
    case K::var_a: return Jet2<T>::var_a(a);
    case K::var_b: return Jet2<T>::var_b(b);
    case K::add: return eval(*n.lhs, a, b) + eval(*n.rhs, a, b);
    case K::sub: return eval(*n.lhs, a, b) - eval(*n.rhs, a, b);
    case K::mul: return eval(*n.lhs, a, b) * eval(*n.rhs, a, b);
    case K::div: {
        auto den = eval(*n.rhs, a, b);
        if (den.value == T(0)) throw domain_error("division by zero");
        return eval(*n.lhs, a, b) / den;
    }
    case K::neg: return -eval(*n.lhs, a, b);
    case K::pow: {
        auto base = eval(*n.lhs, a, b);
        if (is_integer_exponent(n.value)) {
            if (n.value < 0 && base.value == T(0)) throw domain_error("zero to a negative power");
            return ipow(base, static_cast<long>(n.value));
        }
        if (!(base.value > T(0))) throw domain_error("nonpositive base under real power");
        return rpow(base, T(n.value));
    }
    }
    throw domain_error("corrupt expression node");
}

}  // namespace ex

// ---------------------------------------------------------------------------
// CurvatureFunction
// ---------------------------------------------------------------------------

/// Immutable symmetric function of (a, b) with second-order forward-mode derivatives.
class CurvatureFunction
{
public:
    CurvatureFunction() = default;
    CurvatureFunction(NodePtr root, std::string text, std::optional<double> degree_hint = std::nullopt)
        : root_(std::move(root)), text_(std::move(text)), degree_hint_(degree_hint)
    {
        if (!degree_hint_ && root_) degree_hint_ = ex::structural_degree(*root_);
    }

    template <class T = double>
    Jet2<T> jet(const T& a, const T& b) const
    {
        if (!(a > T(0)) || !(b > T(0))) throw domain_error("arguments must be positive");
        return ex::eval(*root_, a, b);
    }

    double operator()(double a, double b) const { return jet(a, b).value; }

    const NodePtr& root() const { return root_; }
    const std::string& text() const { return text_; }
    std::optional<double> degree_hint() const { return degree_hint_; }

    CurvatureFunction with_degree(std::optional<double> chi) const
    {
        CurvatureFunction f = *this;
        f.degree_hint_ = chi;
        return f;
    }

private:
    NodePtr root_;
    std::string text_;
    std::optional<double> degree_hint_;
};

template <class T = double>
Jet2<T> eval_jet2(const CurvatureFunction& f, const T& a, const T& b)
{
    return f.jet<T>(a, b);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser
{
public:
    Parser(const std::string& text, double s) : text_(text), s_(s) {}

    NodePtr parse()
    {
        auto n = expr();
        skip();
        if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return n;
    }

private:
    const std::string& text_;
    double s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr()
    {
        auto n = term();
        for (;;) {
            if (accept('+')) n = ex::add(n, term());
            else if (accept('-')) n = ex::sub(n, term());
            else return n;
        }
    }

    NodePtr term()
    {
        auto n = factor();
        for (;;) {
            if (accept('*')) n = ex::mul(n, factor());
            else if (accept('/')) n = ex::div(n, factor());
            else return n;
        }
    }

    // unary sign is an extension of the grammar; it binds looser than '^'
    NodePtr factor()
    {
        if (accept('-')) return ex::neg(factor());
        if (accept('+')) return factor();
        auto n = base();
        if (accept('^')) n = ex::pow(n, exponent());
        return n;
    }

    NodePtr base()
    {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = expr();
            expect(')');
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ex::constant(number());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string id = text_.substr(start, pos_ - start);
            if (id == "a") return ex::var_a();
            if (id == "b") return ex::var_b();
            if (id == "s") return ex::constant(s_);
            if (id == "sqrt") {
                expect('(');
                auto n = expr();
                expect(')');
                return ex::pow(n, 0.5);
            }
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        fail(std::string("unexpected '") + c + "'");
    }

    double exponent()
    {
        skip();
        if (accept('(')) {
            const std::size_t start = pos_;
            auto n = expr();
            expect(')');
            if (ex::depends_on_ab(*n)) {
                pos_ = start;
                fail("exponent must not depend on a or b");
            }
            return ex::eval<double>(*n, 1.0, 1.0).value;
        }
        double sign = 1;
        if (accept('-')) sign = -1;
        else accept('+');
        skip();
        if (pos_ < text_.size() && text_[pos_] == 's') {
            ++pos_;
            return sign * s_;
        }
        return sign * number();
    }

    double number()
    {
        skip();
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected number");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }
};

}  // namespace detail

/// Parse the small expression grammar over a, b and the parameter s.
inline CurvatureFunction parse_expression(const std::string& text, double parameter_value = 0.0)
{
    detail::Parser p(text, parameter_value);
    return CurvatureFunction(p.parse(), text);
}

// ---------------------------------------------------------------------------
// Sample-based checks
// ---------------------------------------------------------------------------

struct Pair
{
    double a, b;
};

/// Log-uniform positive pairs in [lo, hi]^2, deterministic for a seed.
inline std::vector<Pair> log_uniform_pairs(std::size_t n, std::uint64_t seed = 0, double lo = 1e-2, double hi = 1e2)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<Pair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::exp(u(rng));
        const double b = std::exp(u(rng));
        out.push_back({a, b});
    }
    return out;
}

struct SampleReport
{
    double max_residual = 0;
    Pair worst{1, 1};
    std::size_t count = 0;
};

inline void record(SampleReport& r, double residual, Pair p)
{
    ++r.count;
    if (residual > r.max_residual || std::isnan(residual)) {
        r.max_residual = std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual;
        r.worst = p;
    }
}

/// Relative residual of a f_a + b f_b - chi f.
inline SampleReport check_euler(const CurvatureFunction& f, double chi, const std::vector<Pair>& samples)
{
    if (samples.empty()) throw std::invalid_argument("check_euler: empty sample list");
    SampleReport r;
    for (auto p : samples) {
        const auto j = f.jet(p.a, p.b);
        const double lhs = p.a * j.da + p.b * j.db;
        const double scale = std::max({std::fabs(p.a * j.da) + std::fabs(p.b * j.db), std::fabs(chi * j.value),
                                       std::numeric_limits<double>::min()});
        record(r, std::fabs(lhs - chi * j.value) / scale, p);
    }
    return r;
}

inline SampleReport check_symmetry(const CurvatureFunction& f, const std::vector<Pair>& samples)
{
    SampleReport r;
    for (auto p : samples) {
        const double x = f(p.a, p.b), y = f(p.b, p.a);
        const double scale = std::max({std::fabs(x), std::fabs(y), std::numeric_limits<double>::min()});
        record(r, std::fabs(x - y) / scale, p);
    }
    return r;
}

inline SampleReport check_homogeneity(const CurvatureFunction& f, double chi, const std::vector<Pair>& samples,
                                      const std::vector<double>& scales = {0.5, 2.0, 10.0})
{
    SampleReport r;
    for (auto p : samples)
        for (double s : scales) {
            const double x = f(s * p.a, s * p.b), y = std::pow(s, chi) * f(p.a, p.b);
            const double scale = std::max({std::fabs(x), std::fabs(y), std::numeric_limits<double>::min()});
            record(r, std::fabs(x - y) / scale, p);
        }
    return r;
}

struct DegreeEstimate
{
    double degree = 0;
    double spread = 0;
    std::size_t used = 0;
};

/// Median of (a f_a + b f_b)/f over samples where f is nonzero.
inline DegreeEstimate estimate_degree(const CurvatureFunction& f, const std::vector<Pair>& samples)
{
    std::vector<double> q;
    for (auto p : samples) {
        const auto j = f.jet(p.a, p.b);
        if (j.value == 0) continue;
        q.push_back((p.a * j.da + p.b * j.db) / j.value);
    }
    if (q.empty()) throw domain_error("estimate_degree: function vanishes on every sample");
    std::sort(q.begin(), q.end());
    const std::size_t m = q.size() / 2;
    const double med = q.size() % 2 ? q[m] : 0.5 * (q[m - 1] + q[m]);
    return {med, q.back() - q.front(), q.size()};
}

}  // namespace mpf
