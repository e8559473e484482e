#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "psplit/linalg.hpp"

namespace psplit {

/// x = prox_{rho T}(a) together with y = (a - x) / rho, so y is in T(x).
struct ProxResult {
    Vec x;
    Vec y;
};

/// A monotone operator on a finite-dimensional space.
///
/// Each operator declares which evaluations it supports. Forward-evaluable
/// operators must be single valued, continuous and defined everywhere;
/// prox-evaluable operators must be maximal monotone. Asking for an
/// evaluation the operator does not declare throws ContractError.
class MonotoneOperator {
public:
    class Impl {
    public:
        virtual ~Impl() = default;
        virtual std::string name() const = 0;
        virtual bool can_forward() const = 0;
        virtual bool can_prox() const = 0;
        virtual Vec forward(const Vec& x) const;
        /// Only the primal part; y is recovered from the resolvent identity.
        virtual Vec prox_point(double rho, const Vec& a) const;
    };

    MonotoneOperator(Space space, std::shared_ptr<const Impl> impl);

    Space space() const { return space_; }
    std::string name() const { return impl_->name(); }
    bool can_forward() const { return impl_->can_forward(); }
    bool can_prox() const { return impl_->can_prox(); }

    Vec forward(const Vec& x) const;
    ProxResult prox(double rho, const Vec& a) const;

private:
    Space space_;
    std::shared_ptr<const Impl> impl_;
};

inline Vec forward_eval(const MonotoneOperator& t, const Vec& x) { return t.forward(x); }
inline ProxResult prox_eval(const MonotoneOperator& t, double rho, const Vec& a) { return t.prox(rho, a); }

// Library operators.

/// T(x) = M x + b. Rejects M unless the smallest eigenvalue of (M + M^T)/2 is >= -1e-10.
MonotoneOperator affine_monotone(const Matrix& m, const Vec& b);
/// Gradient of f(x) = 0.5 * ||A x - b||^2, i.e. A^T (A x - b).
MonotoneOperator gradient_quadratic(const Matrix& a, const Vec& b);
/// lambda * subdifferential of ||.||_1 on R^dim (prox only).
MonotoneOperator l1_subdifferential(std::size_t dim, double lambda);
/// Normal cone of the box [l, u] (prox only).
MonotoneOperator box_normal_cone(const Vec& lower, const Vec& upper);
/// T(x) = x^3 componentwise (forward only; continuous, not Lipschitz).
MonotoneOperator cube(std::size_t dim);
/// T(x) = sign(x) sqrt(|x|) componentwise (forward only; not Lipschitz at 0).
MonotoneOperator signed_sqrt(std::size_t dim);
/// T(x) = 0.
MonotoneOperator zero_op(std::size_t dim);

/// T(x) - c. Keeps the capabilities of T.
MonotoneOperator shifted(MonotoneOperator t, const Vec& c);
/// T1 + T2 for two forward-evaluable operators (forward only).
MonotoneOperator sum(MonotoneOperator t1, MonotoneOperator t2);

// Inexact prox evaluation.

enum class ErrorMode { none, seeded_random };

struct ErrorPolicy {
    double sigma = 0.0;
    ErrorMode mode = ErrorMode::none;
    double magnitude = 0.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError unless 0 <= sigma < 1 and magnitude >= 0.
    void validate() const;
    friend bool operator==(const ErrorPolicy&, const ErrorPolicy&) = default;
};

struct InjectedProx {
    Vec error;
    ProxResult result;
    int halvings = 0;
};

/// True when e satisfies both error conditions
///   <Gz - x, e> >= -sigma ||Gz - x||^2   and   <e, y - w> <= rho sigma ||y - w||^2
/// with an absolute slack `tol`.
bool error_within_bounds(const Vec& gz, const Vec& w, const Vec& e, const ProxResult& r, double rho,
                         double sigma, double tol = 0.0);

/// Evaluates the prox at base_input + e, halving `candidate` until the error
/// conditions hold, at most 50 times, then falling back to e = 0.
InjectedProx shrink_error_until_admissible(const Vec& candidate, double sigma, const Vec& base_input,
                                           const MonotoneOperator& t, double rho, const Vec& gz,
                                           const Vec& w);

/// Seeded generator of admissible prox errors for one block.
class ErrorInjector {
public:
    explicit ErrorInjector(ErrorPolicy policy);

    const ErrorPolicy& policy() const { return policy_; }

    InjectedProx inject(const Vec& base_input, const MonotoneOperator& t, double rho, const Vec& gz,
                        const Vec& w);

private:
    ErrorPolicy policy_;
    std::mt19937_64 rng_;
};

}  // namespace psplit
