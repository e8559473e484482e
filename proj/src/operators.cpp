#include "psplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>

namespace psplit {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

Eigen::VectorXd to_eigen(const Vec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.span().data(), static_cast<Eigen::Index>(v.size()));
}

Vec from_eigen(const Eigen::VectorXd& v) { return Vec(std::vector<double>(v.data(), v.data() + v.size())); }

template <class F>
Vec map_entries(const Vec& x, F f) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
    return Vec(std::move(out));
}

class Affine final : public MonotoneOperator::Impl {
public:
    Affine(Matrix m, Vec b) : m_(std::move(m)), b_(std::move(b)), dense_(to_eigen(m_)) {}
    std::string name() const override { return "affine"; }
    bool can_forward() const override { return true; }
    bool can_prox() const override { return true; }
    Vec forward(const Vec& x) const override { return m_ * x + b_; }
    // (I + rho M) x = a - rho b
    Vec prox_point(double rho, const Vec& a) const override {
        const auto n = static_cast<Eigen::Index>(a.size());
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) + rho * dense_;
        Eigen::VectorXd rhs = to_eigen(a) - rho * to_eigen(b_);
        return from_eigen(lhs.partialPivLu().solve(rhs));
    }

private:
    Matrix m_;
    Vec b_;
    Eigen::MatrixXd dense_;
};

class GradientQuadratic final : public MonotoneOperator::Impl {
public:
    GradientQuadratic(Matrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
        Eigen::MatrixXd ae = to_eigen(a_);
        gram_ = ae.transpose() * ae;
        atb_ = ae.transpose() * to_eigen(b_);
    }
    std::string name() const override { return "gradient_quadratic"; }
    bool can_forward() const override { return true; }
    bool can_prox() const override { return true; }
    Vec forward(const Vec& x) const override { return transpose_times(a_, a_ * x - b_); }
    // (I + rho A^T A) x = a + rho A^T b
    Vec prox_point(double rho, const Vec& a) const override {
        const auto n = gram_.rows();
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) + rho * gram_;
        Eigen::VectorXd rhs = to_eigen(a) + rho * atb_;
        return from_eigen(lhs.llt().solve(rhs));
    }

private:
    Matrix a_;
    Vec b_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd atb_;
};

class L1 final : public MonotoneOperator::Impl {
public:
    explicit L1(double lambda) : lambda_(lambda) {}
    std::string name() const override { return "l1"; }
    bool can_forward() const override { return false; }
    bool can_prox() const override { return true; }
    Vec prox_point(double rho, const Vec& a) const override {
        const double t = rho * lambda_;
        return map_entries(a, [t](double v) {
            if (v > t) return v - t;
            if (v < -t) return v + t;
            return 0.0;
        });
    }

private:
    double lambda_;
};

class BoxNormalCone final : public MonotoneOperator::Impl {
public:
    BoxNormalCone(Vec l, Vec u) : l_(std::move(l)), u_(std::move(u)) {}
    std::string name() const override { return "box_normal_cone"; }
    bool can_forward() const override { return false; }
    bool can_prox() const override { return true; }
    Vec prox_point(double, const Vec& a) const override {
        std::vector<double> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::clamp(a[i], l_[i], u_[i]);
        return Vec(std::move(out));
    }

private:
    Vec l_;
    Vec u_;
};

class Cube final : public MonotoneOperator::Impl {
public:
    std::string name() const override { return "cube"; }
    bool can_forward() const override { return true; }
    bool can_prox() const override { return false; }
    Vec forward(const Vec& x) const override {
        return map_entries(x, [](double v) { return v * v * v; });
    }
};

class SignedSqrt final : public MonotoneOperator::Impl {
public:
    std::string name() const override { return "signed_sqrt"; }
    bool can_forward() const override { return true; }
    bool can_prox() const override { return false; }
    Vec forward(const Vec& x) const override {
        return map_entries(x, [](double v) { return std::copysign(std::sqrt(std::abs(v)), v); });
    }
};

class Zero final : public MonotoneOperator::Impl {
public:
    std::string name() const override { return "zero"; }
    bool can_forward() const override { return true; }
    bool can_prox() const override { return true; }
    Vec forward(const Vec& x) const override { return Vec::zeros(x.size()); }
    Vec prox_point(double, const Vec& a) const override { return a; }
};

class Shifted final : public MonotoneOperator::Impl {
public:
    Shifted(MonotoneOperator t, Vec c) : t_(std::move(t)), c_(std::move(c)) {}
    std::string name() const override { return t_.name() + "_shifted"; }
    bool can_forward() const override { return t_.can_forward(); }
    bool can_prox() const override { return t_.can_prox(); }
    Vec forward(const Vec& x) const override { return t_.forward(x) - c_; }
    // x + rho (T x - c) = a  <=>  x = prox_{rho T}(a + rho c)
    Vec prox_point(double rho, const Vec& a) const override { return t_.prox(rho, axpy(a, rho, c_)).x; }

private:
    MonotoneOperator t_;
    Vec c_;
};

class Sum final : public MonotoneOperator::Impl {
public:
    Sum(MonotoneOperator a, MonotoneOperator b) : a_(std::move(a)), b_(std::move(b)) {}
    std::string name() const override { return a_.name() + "+" + b_.name(); }
    bool can_forward() const override { return true; }
    bool can_prox() const override { return false; }
    Vec forward(const Vec& x) const override { return a_.forward(x) + b_.forward(x); }

private:
    MonotoneOperator a_;
    MonotoneOperator b_;
};

}  // namespace

Vec MonotoneOperator::Impl::forward(const Vec&) const {
    throw ContractError(name() + " is not forward-evaluable");
}

Vec MonotoneOperator::Impl::prox_point(double, const Vec&) const {
    throw ContractError(name() + " is not prox-evaluable");
}

MonotoneOperator::MonotoneOperator(Space space, std::shared_ptr<const Impl> impl)
    : space_(space), impl_(std::move(impl)) {
    if (!impl_) throw ContractError("operator implementation is null");
    if (!impl_->can_forward() && !impl_->can_prox())
        throw ContractError(impl_->name() + " declares no evaluation capability");
}

Vec MonotoneOperator::forward(const Vec& x) const {
    if (!can_forward()) throw ContractError(name() + " is not forward-evaluable");
    if (x.space() != space_) throw StructuralError(name() + ": forward argument has wrong dimension");
    return impl_->forward(x);
}

ProxResult MonotoneOperator::prox(double rho, const Vec& a) const {
    if (!can_prox()) throw ContractError(name() + " is not prox-evaluable");
    if (!(rho > 0.0)) throw ConfigError("prox stepsize rho must be positive");
    if (a.space() != space_) throw StructuralError(name() + ": prox argument has wrong dimension");
    Vec x = impl_->prox_point(rho, a);
    Vec y = (1.0 / rho) * (a - x);
    return {std::move(x), std::move(y)};
}

MonotoneOperator affine_monotone(const Matrix& m, const Vec& b) {
    if (m.rows() != m.cols()) throw StructuralError("affine_monotone: M must be square");
    if (b.size() != m.rows()) throw StructuralError("affine_monotone: shift has wrong dimension");
    const Eigen::MatrixXd me = to_eigen(m);
    const Eigen::MatrixXd sym = 0.5 * (me + me.transpose());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    if (min_eig < -1e-10)
        throw ConfigError("affine_monotone: M is not monotone (smallest eigenvalue of (M+M^T)/2 is " +
                          std::to_string(min_eig) + ")");
    return MonotoneOperator(Space{m.rows()}, std::make_shared<Affine>(m, b));
}

MonotoneOperator gradient_quadratic(const Matrix& a, const Vec& b) {
    if (b.size() != a.rows()) throw StructuralError("gradient_quadratic: b has wrong dimension");
    return MonotoneOperator(Space{a.cols()}, std::make_shared<GradientQuadratic>(a, b));
}

MonotoneOperator l1_subdifferential(std::size_t dim, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("l1 weight lambda must be >= 0");
    return MonotoneOperator(Space{dim}, std::make_shared<L1>(lambda));
}

MonotoneOperator box_normal_cone(const Vec& lower, const Vec& upper) {
    require_same_size(lower, upper, "box_normal_cone");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] <= upper[i])) throw ConfigError("box_normal_cone: lower bound exceeds upper bound");
    return MonotoneOperator(lower.space(), std::make_shared<BoxNormalCone>(lower, upper));
}

MonotoneOperator cube(std::size_t dim) { return MonotoneOperator(Space{dim}, std::make_shared<Cube>()); }

MonotoneOperator signed_sqrt(std::size_t dim) {
    return MonotoneOperator(Space{dim}, std::make_shared<SignedSqrt>());
}

MonotoneOperator zero_op(std::size_t dim) { return MonotoneOperator(Space{dim}, std::make_shared<Zero>()); }

MonotoneOperator shifted(MonotoneOperator t, const Vec& c) {
    if (c.space() != t.space()) throw StructuralError("shifted: shift has wrong dimension");
    const Space s = t.space();
    return MonotoneOperator(s, std::make_shared<Shifted>(std::move(t), c));
}

MonotoneOperator sum(MonotoneOperator t1, MonotoneOperator t2) {
    if (t1.space() != t2.space()) throw StructuralError("sum: operators act on different spaces");
    if (!t1.can_forward() || !t2.can_forward()) throw ContractError("sum: both terms must be forward-evaluable");
    const Space s = t1.space();
    return MonotoneOperator(s, std::make_shared<Sum>(std::move(t1), std::move(t2)));
}

void ErrorPolicy::validate() const {
    if (!(sigma >= 0.0 && sigma < 1.0)) throw ConfigError("errors.sigma must satisfy 0 <= sigma < 1");
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) throw ConfigError("errors.magnitude must be >= 0");
}

bool error_within_bounds(const Vec& gz, const Vec& w, const Vec& e, const ProxResult& r, double rho,
                         double sigma, double tol) {
    const Vec primal_gap = gz - r.x;
    const Vec dual_gap = r.y - w;
    const bool first = dot(primal_gap, e) >= -sigma * squared_norm(primal_gap) - tol;
    const bool second = dot(e, dual_gap) <= rho * sigma * squared_norm(dual_gap) + tol;
    return first && second;
}

InjectedProx shrink_error_until_admissible(const Vec& candidate, double sigma, const Vec& base_input,
                                           const MonotoneOperator& t, double rho, const Vec& gz,
                                           const Vec& w) {
    constexpr int max_halvings = 50;
    Vec e = candidate;
    for (int h = 0; h <= max_halvings; ++h) {
        ProxResult r = t.prox(rho, base_input + e);
        if (error_within_bounds(gz, w, e, r, rho, sigma)) return {std::move(e), std::move(r), h};
        e = 0.5 * e;
    }
    Vec zero = Vec::zeros(base_input.size());
    return {zero, t.prox(rho, base_input), max_halvings + 1};
}

ErrorInjector::ErrorInjector(ErrorPolicy policy) : policy_(policy), rng_(policy.seed) { policy_.validate(); }

InjectedProx ErrorInjector::inject(const Vec& base_input, const MonotoneOperator& t, double rho, const Vec& gz,
                                   const Vec& w) {
    if (policy_.mode == ErrorMode::none || policy_.magnitude == 0.0)
        return {Vec::zeros(base_input.size()), t.prox(rho, base_input), 0};
    std::normal_distribution<double> gauss;
    std::vector<double> dir(base_input.size());
    double nrm2 = 0.0;
    while (nrm2 == 0.0) {
        for (auto& d : dir) d = gauss(rng_);
        nrm2 = 0.0;
        for (double d : dir) nrm2 += d * d;
    }
    const double scale = policy_.magnitude / std::sqrt(nrm2);
    for (auto& d : dir) d *= scale;
    return shrink_error_until_admissible(Vec(std::move(dir)), policy_.sigma, base_input, t, rho, gz, w);
}

}  // namespace psplit
