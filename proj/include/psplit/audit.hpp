#pragma once

#include <string>
#include <vector>

#include "psplit/engine.hpp"

namespace psplit {

struct AuditTolerances {
    double separation = 1e-9;   // phi_k(p*) <= tol (1 + ||p*||_gamma)
    double fejer = 1e-10;       // ||p+ - p*|| <= ||p - p*|| + tol
    double pi_relative = 1e-10;
    double update_identity = 1e-10;
    double projection = 1e-9;
    double error_bounds = 1e-12;
    double stepsize_relative = 1e-12;
};

struct CheckResult {
    std::string name;
    long evaluations = 0;
    long failures = 0;
    long first_failure = -1;  // iteration
    double worst = 0.0;       // largest normalized violation seen (<= 0 passes)
    std::string detail;

    bool passed() const { return failures == 0; }
};

/// Checks the per-iteration invariants of a run as it happens.
///
/// Attach with engine.set_observer(auditor.observer()). Reference points are
/// KKT points used for the separation and Fejer checks; pass none to skip them.
class InvariantAuditor {
public:
    InvariantAuditor(const ProblemSpec& problem, const EngineConfig& config, double sigma,
                     std::vector<PrimalDualPoint> reference_points, AuditTolerances tol = {});

    void observe(const IterationView& view);
    IterationObserver observer();

    /// Coverage window M and delay bound D from the recorded selections and delays.
    void audit_schedule(const std::vector<IterationRecord>& records, std::size_t window, std::size_t max_delay);

    /// Marks a check failed outright (e.g. the run aborted inside a linesearch).
    void record_failure(const std::string& check, long iter, const std::string& detail);

    const std::vector<CheckResult>& results() const { return results_; }
    const CheckResult& result(const std::string& name) const;
    bool all_passed() const;

private:
    CheckResult& check(const std::string& name);
    void note(const std::string& name, long iter, double violation, const std::string& detail = {});

    const ProblemSpec& problem_;
    EngineConfig config_;
    double sigma_;
    std::vector<PrimalDualPoint> refs_;
    AuditTolerances tol_;
    std::vector<CheckResult> results_;
};

/// Names of the checks, in report order.
std::vector<std::string> audit_check_names();

/// One line per check: name, PASS/FAIL, evaluations, first failing iteration.
std::string format_audit_table(const std::vector<CheckResult>& results);

}  // namespace psplit
