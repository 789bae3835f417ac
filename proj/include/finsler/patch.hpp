// Coordinate patch data: the symmetric matrix field a_ij(x), the covector
// field b_i(x), and the axis-aligned domain box they live on.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

struct Box {
    Vec lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Vec& x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }

    Vec center() const {
        Vec c(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }
};

// Base point plus nonzero tangent vector; the argument of all metric
// quantities.
struct DirectionPoint {
    Vec x, y;
};

class ManifoldPatch {
public:
    // a is row-major n*n (must be structurally symmetric), b has n entries.
    ManifoldPatch(std::string name, Box domain, std::vector<ScalarExpr> a,
                  std::vector<ScalarExpr> b)
        : name_(std::move(name)),
          domain_(std::move(domain)),
          a_(std::move(a)),
          b_(std::move(b)),
          n_(domain_.dim()) {
        if (n_ < 2) throw Error("patch dimension must be at least 2");
        if (static_cast<int>(a_.size()) != n_ * n_)
            throw Error("a must have dim*dim entries");
        if (static_cast<int>(b_.size()) != n_) throw Error("b must have dim entries");
        for (const auto& e : a_)
            if (e.arity() != n_) throw Error("a entry arity does not match patch dimension");
        for (const auto& e : b_)
            if (e.arity() != n_) throw Error("b entry arity does not match patch dimension");
    }

    const std::string& name() const { return name_; }
    int dim() const { return n_; }
    const Box& domain() const { return domain_; }
    const ScalarExpr& a_entry(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }
    const ScalarExpr& b_entry(int i) const { return b_[static_cast<std::size_t>(i)]; }

    // a(x) as a flat symmetric n*n array of T; entries above the diagonal are
    // evaluated once and mirrored.
    template <class T>
    void eval_a(std::span<const T> x, std::vector<T>& out) const {
        out.assign(static_cast<std::size_t>(n_) * n_, T(0.0));
        for (int i = 0; i < n_; ++i) {
            for (int j = i; j < n_; ++j) {
                T v = a_entry(i, j).template eval<T>(x);
                out[static_cast<std::size_t>(i) * n_ + j] = v;
                out[static_cast<std::size_t>(j) * n_ + i] = v;
            }
        }
    }

    template <class T>
    void eval_b(std::span<const T> x, std::vector<T>& out) const {
        out.assign(static_cast<std::size_t>(n_), T(0.0));
        for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = b_[static_cast<std::size_t>(i)].template eval<T>(x);
    }

    Mat a_at(const Vec& x) const {
        std::vector<double> flat;
        eval_a<double>(std::span<const double>(x.data(), x.size()), flat);
        Mat m(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m(i, j) = flat[static_cast<std::size_t>(i) * n_ + j];
        return m;
    }

    Vec b_at(const Vec& x) const {
        std::vector<double> out;
        eval_b<double>(std::span<const double>(x.data(), x.size()), out);
        return out;
    }

    // Cholesky-checks a(x) on a regular grid over the domain; throws
    // ConvexityError at the first failure.
    void validate_spd_on_grid(int per_axis = 5) const {
        Vec x(static_cast<std::size_t>(n_), 0.0);
        std::vector<int> idx(static_cast<std::size_t>(n_), 0);
        for (;;) {
            for (int i = 0; i < n_; ++i) {
                double t = (per_axis == 1) ? 0.5
                                           : static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                                                 (per_axis - 1);
                x[static_cast<std::size_t>(i)] =
                    domain_.lo[static_cast<std::size_t>(i)] +
                    t * (domain_.hi[static_cast<std::size_t>(i)] - domain_.lo[static_cast<std::size_t>(i)]);
            }
            if (!cholesky_spd(a_at(x))) {
                std::string msg = "a(x) not positive definite at (";
                for (int i = 0; i < n_; ++i)
                    msg += (i ? ", " : "") + std::to_string(x[static_cast<std::size_t>(i)]);
                throw ConvexityError(msg + ")");
            }
            int k = 0;
            while (k < n_ && ++idx[static_cast<std::size_t>(k)] == per_axis) {
                idx[static_cast<std::size_t>(k)] = 0;
                ++k;
            }
            if (k == n_) break;
        }
    }

private:
    std::string name_;
    Box domain_;
    std::vector<ScalarExpr> a_;
    std::vector<ScalarExpr> b_;
    int n_;
};

}  // namespace finsler
