// psplit: run, verify and list the built-in projective splitting problems.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "psplit/audit.hpp"
#include "psplit/config.hpp"
#include "psplit/engine.hpp"
#include "psplit/problems.hpp"
#include "psplit/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { ok = 0, usage = 1, budget = 2, violation = 3, invariant_failure = 4 };

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<long> max_iters;
};

psplit::RunConfig load(const std::string& path, const Overrides& ov) {
    psplit::RunConfig cfg = psplit::parse_config(psplit::read_file(path));
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.max_iters) cfg.engine.max_iters = *ov.max_iters;
    psplit::validate_config(cfg);
    return cfg;
}

int exit_code_for(psplit::RunStatus status) {
    switch (status) {
        case psplit::RunStatus::converged:
        case psplit::RunStatus::exact_termination:
            return ok;
        case psplit::RunStatus::budget:
            return budget;
        case psplit::RunStatus::assumption_violation:
            return violation;
        case psplit::RunStatus::running:
            break;
    }
    return usage;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& ov) {
    const psplit::RunConfig cfg = load(config_path, ov);
    const psplit::ProblemInstance inst = psplit::build_problem(cfg);
    psplit::Engine engine(inst.spec, cfg.engine, cfg.schedule_policy(), cfg.error_policy());
    const psplit::RunTrace trace = engine.run();

    fs::create_directories(out_dir);
    psplit::write_file((fs::path(out_dir) / cfg.trace_path).string(),
                       psplit::trace_csv(trace, inst.spec.num_blocks()));
    psplit::write_file((fs::path(out_dir) / cfg.summary_path).string(), psplit::summary_json(trace, inst));

    std::cout << inst.spec.name << ": " << psplit::to_string(trace.status) << " after " << trace.iterations
              << " iterations\n";
    if (!trace.message.empty()) std::cout << trace.message << '\n';
    return exit_code_for(trace.status);
}

int cmd_verify(const std::string& config_path, const Overrides& ov) {
    const psplit::RunConfig cfg = load(config_path, ov);
    const psplit::ProblemInstance inst = psplit::build_problem(cfg);
    const psplit::SchedulePolicy policy = cfg.schedule_policy();
    const psplit::ErrorPolicy errors = cfg.error_policy();

    psplit::Engine engine(inst.spec, cfg.engine, policy, errors);
    psplit::InvariantAuditor auditor(engine.problem(), cfg.engine, errors.sigma, {inst.reference.point()});
    engine.set_observer(auditor.observer());
    const psplit::RunTrace trace = engine.run();
    if (trace.status == psplit::RunStatus::assumption_violation)
        auditor.record_failure("backtracking-acceptance", trace.iterations, trace.message);
    auditor.audit_schedule(trace.records, policy.effective_window(inst.spec.num_blocks()), policy.max_delay);

    std::cout << inst.spec.name << ": " << psplit::to_string(trace.status) << " after " << trace.iterations
              << " iterations\n\n"
              << psplit::format_audit_table(auditor.results());
    if (!auditor.all_passed()) {
        for (const auto& r : auditor.results())
            if (!r.passed()) {
                std::cout << "first failing check: " << r.name << " at iteration " << r.first_failure << '\n';
                break;
            }
        return invariant_failure;
    }
    return ok;
}

int cmd_list() {
    for (const auto& name : psplit::builtin_problem_names()) {
        const psplit::ProblemInstance inst = psplit::make_builtin(name, 1);
        std::cout << name << "  n=" << inst.spec.num_blocks() << "  dim=" << inst.spec.primal.dim << "  blocks:";
        for (std::size_t i = 0; i < inst.spec.num_blocks(); ++i)
            std::cout << ' ' << inst.spec.operators[i].name() << '(' << psplit::to_string(inst.spec.partition[i])
                      << ')';
        std::cout << "\n    reference: " << inst.reference.provenance << '\n';
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous projective splitting with backtracking forward steps"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    Overrides ov;
    std::uint64_t seed_override = 0;
    long max_iters_override = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed-override", seed_override, "Replace the configured run seed");
        sub->add_option("--max-iters-override", max_iters_override, "Replace engine.max_iters");
    };

    CLI::App* run = app.add_subcommand("run", "Run the solver and write trace.csv and summary.json");
    add_common(run);
    run->add_option("--out", out_dir, "Output directory");

    CLI::App* verify = app.add_subcommand("verify", "Run the solver and check every per-iteration invariant");
    add_common(verify);

    app.add_subcommand("list-problems", "List the built-in problem families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    for (CLI::App* sub : {run, verify}) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed-override")) ov.seed = seed_override;
        if (sub->count("--max-iters-override")) ov.max_iters = max_iters_override;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, ov);
        if (verify->parsed()) return cmd_verify(config_path, ov);
        return cmd_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
}
