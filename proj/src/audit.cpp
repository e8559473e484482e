#include "psplit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace psplit {

namespace {

constexpr const char* kSeparation = "separation";
constexpr const char* kFejer = "fejer";
constexpr const char* kPiGradient = "pi-gradient-identity";
constexpr const char* kAffine = "affine-consistency";
constexpr const char* kProjection = "projection-exactness";
constexpr const char* kUpdateIdentity = "update-identities";
constexpr const char* kBacktracking = "backtracking-acceptance";
constexpr const char* kErrorBounds = "error-bounds";
constexpr const char* kCarryOver = "carry-over";
constexpr const char* kSchedule = "schedule-assumptions";

CheckResult named(const std::string& name) {
    CheckResult r;
    r.name = name;
    return r;
}

}  // namespace

std::vector<std::string> audit_check_names() {
    return {kSeparation,      kFejer,       kPiGradient,    kAffine,    kProjection,
            kUpdateIdentity, kBacktracking, kErrorBounds, kCarryOver, kSchedule};
}

InvariantAuditor::InvariantAuditor(const ProblemSpec& problem, const EngineConfig& config, double sigma,
                                   std::vector<PrimalDualPoint> reference_points, AuditTolerances tol)
    : problem_(problem), config_(config), sigma_(sigma), refs_(std::move(reference_points)), tol_(tol) {
    for (const auto& name : audit_check_names()) results_.push_back(named(name));
}

CheckResult& InvariantAuditor::check(const std::string& name) {
    auto it = std::find_if(results_.begin(), results_.end(), [&](const CheckResult& r) { return r.name == name; });
    if (it == results_.end()) {
        results_.push_back(named(name));
        return results_.back();
    }
    return *it;
}

const CheckResult& InvariantAuditor::result(const std::string& name) const {
    auto it = std::find_if(results_.begin(), results_.end(), [&](const CheckResult& r) { return r.name == name; });
    if (it == results_.end()) throw ContractError("no audit check named " + name);
    return *it;
}

bool InvariantAuditor::all_passed() const {
    return std::all_of(results_.begin(), results_.end(), [](const CheckResult& r) { return r.passed(); });
}

// violation is normalized so that > 0 means the check failed
void InvariantAuditor::note(const std::string& name, long iter, double violation, const std::string& detail) {
    CheckResult& r = check(name);
    ++r.evaluations;
    if (r.evaluations == 1 || violation > r.worst) r.worst = violation;
    if (violation > 0.0 || std::isnan(violation)) {
        if (r.failures == 0) {
            r.first_failure = iter;
            r.detail = detail;
        }
        ++r.failures;
    }
}

void InvariantAuditor::record_failure(const std::string& name, long iter, const std::string& detail) {
    note(name, iter, 1.0, detail);
}

IterationObserver InvariantAuditor::observer() {
    return [this](const IterationView& view) { observe(view); };
}

void InvariantAuditor::observe(const IterationView& view) {
    const long k = view.k;
    const double gamma = config_.gamma;
    const SeparatorEval& sep = view.separator;

    for (const auto& ref : refs_) {
        const double phi_star = affine_value(problem_, view.blocks, ref);
        const double bound = tol_.separation * (1.0 + gamma_norm(ref, gamma));
        note(kSeparation, k, phi_star - bound, "phi_k(p*) = " + std::to_string(phi_star));

        const double before = gamma_norm(view.p - ref, gamma);
        const double after = gamma_norm(view.p_next - ref, gamma);
        note(kFejer, k, after - before - tol_.fejer,
             "distance grew from " + std::to_string(before) + " to " + std::to_string(after));
    }

    {
        const PrimalDualPoint grad = separator_gradient(problem_, view.blocks, gamma);
        const double g2 = gamma_inner(grad, grad, gamma);
        const double scale = std::max(sep.pi, g2);
        // Below the zero threshold both sides are cancellation residue; they
        // only have to agree that the gradient vanishes.
        const double violation = scale <= config_.pi_zero_eps ? -1.0 : std::abs(sep.pi - g2) - tol_.pi_relative * scale;
        note(kPiGradient, k, violation,
             "pi = " + std::to_string(sep.pi) + ", ||grad phi||^2 = " + std::to_string(g2));
    }

    {
        const double direct = affine_value(problem_, view.blocks, view.p);
        double scale = std::abs(dot(view.p.z, sep.v));
        for (std::size_t i = 0; i < view.blocks.size(); ++i) scale += std::abs(dot(view.blocks[i].x, view.blocks[i].y));
        for (std::size_t i = 0; i < sep.u.size(); ++i) scale += std::abs(dot(view.p.w[i], sep.u[i]));
        note(kAffine, k, std::abs(direct - sep.phi_at_p) - 1e-12 * (1.0 + scale),
             "phi via hyperplane form " + std::to_string(sep.phi_at_p) + " vs affine form " + std::to_string(direct));
    }

    if (!view.exact_termination && sep.phi_at_p > 0.0 && view.record.beta == 1.0 && config_.alpha_scale == 1.0 &&
        sep.pi > config_.pi_zero_eps) {
        const double after = affine_value(problem_, view.blocks, view.p_next);
        note(kProjection, k, std::abs(after) - tol_.projection * (1.0 + std::abs(sep.phi_at_p)),
             "phi_k(p_{k+1}) = " + std::to_string(after));
    }

    for (const BlockUpdate& up : view.updates) {
        const BlockState& b = view.blocks[up.block];
        const MonotoneOperator& t = problem_.operators[up.block];
        if (up.kind == BlockKind::backward) {
            const Vec expected_input = axpy(up.gz, up.rho, up.w) + up.error;
            const double gap = norm(axpy(b.x, up.rho, b.y) - expected_input);
            note(kUpdateIdentity, k, gap - tol_.update_identity * (1.0 + norm(expected_input)),
                 "backward block " + std::to_string(up.block + 1) + ": ||x + rho y - a|| = " + std::to_string(gap));
            const bool ok = error_within_bounds(up.gz, up.w, up.error, {b.x, b.y}, up.rho, sigma_, tol_.error_bounds);
            note(kErrorBounds, k, ok ? -1.0 : 1.0, "block " + std::to_string(up.block + 1));
        } else {
            const Vec zeta = t.forward(up.gz);
            const Vec expected_x = axpy(up.gz, -b.rho_accepted, zeta - up.w);
            const double gap = norm(b.x - expected_x);
            const bool y_ok = t.forward(b.x) == b.y;
            note(kUpdateIdentity, k, (gap - tol_.update_identity * (1.0 + norm(up.gz))) + (y_ok ? 0.0 : 1.0),
                 "forward block " + std::to_string(up.block + 1) + ": ||x - (Gz - rho (T Gz - w))|| = " +
                     std::to_string(gap) + (y_ok ? "" : ", y != T(x)"));

            double viol = -1.0;
            std::string why;
            if (up.backtracks > config_.max_backtracks) {
                viol = 1.0;
                why = "count exceeds max_backtracks";
            } else if (up.backtracks == 0) {
                if (b.rho_accepted != up.rho) {
                    viol = 1.0;
                    why = "quick stop changed the stepsize";
                }
            } else {
                const Vec step = up.gz - b.x;
                const double lhs = config_.delta * squared_norm(step) - dot(step, b.y - up.w);
                const double expected_rho = up.rho * std::pow(config_.nu, up.backtracks - 1);
                const double rho_gap =
                    std::abs(b.rho_accepted - expected_rho) - tol_.stepsize_relative * expected_rho;
                if (lhs > 0.0) {
                    viol = 1.0;
                    why = "accepted trial violates the linesearch inequality";
                } else if (rho_gap > 0.0 || b.rho_accepted > up.rho) {
                    viol = 1.0;
                    why = "accepted stepsize is not rho_init nu^(count-1)";
                }
            }
            note(kBacktracking, k, viol, "block " + std::to_string(up.block + 1) + ": " + why);
        }
    }

    std::vector<char> touched(view.blocks.size(), 0);
    for (const auto& up : view.updates) touched[up.block] = 1;
    for (std::size_t i = 0; i < view.blocks.size(); ++i) {
        if (touched[i]) continue;
        note(kCarryOver, k, view.blocks[i] == view.previous_blocks[i] ? -1.0 : 1.0,
             "block " + std::to_string(i + 1) + " changed without being selected");
    }
}

void InvariantAuditor::audit_schedule(const std::vector<IterationRecord>& records, std::size_t window,
                                      std::size_t max_delay) {
    const std::size_t n = problem_.num_blocks();
    std::vector<long> last(n, 0);
    for (const auto& rec : records) {
        std::vector<char> in(n, 0);
        for (std::size_t i : rec.selected) in[i] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (in[i]) {
                const long d = rec.delays[i];
                const bool ok = d >= 1 && d <= rec.iter && rec.iter - d <= static_cast<long>(max_delay);
                note(kSchedule, rec.iter, ok ? -1.0 : 1.0,
                     "block " + std::to_string(i + 1) + " read iterate " + std::to_string(d));
                last[i] = rec.iter;
            } else if (rec.iter - last[i] >= static_cast<long>(window)) {
                note(kSchedule, rec.iter, 1.0,
                     "block " + std::to_string(i + 1) + " skipped for " + std::to_string(window) + " iterations");
            }
        }
    }
}

std::string format_audit_table(const std::vector<CheckResult>& results) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-26s %-6s %10s %12s\n", "check", "result", "evaluated", "first-fail");
    out << line;
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-26s %-6s %10ld %12s\n", r.name.c_str(), r.passed() ? "PASS" : "FAIL",
                      r.evaluations, r.passed() ? "-" : std::to_string(r.first_failure).c_str());
        out << line;
        if (!r.passed() && !r.detail.empty()) out << "    " << r.detail << '\n';
    }
    return out.str();
}

}  // namespace psplit
