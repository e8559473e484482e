#include "psplit/config.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace psplit {

using json = nlohmann::json;

namespace {

const char* kind_name(SelectionKind k) {
    switch (k) {
        case SelectionKind::full:
            return "full";
        case SelectionKind::round_robin:
            return "round-robin";
        case SelectionKind::seeded_random:
            return "seeded-random";
    }
    return "full";
}

const char* delay_name(DelayKind k) {
    switch (k) {
        case DelayKind::zero:
            return "zero";
        case DelayKind::fixed:
            return "fixed";
        case DelayKind::seeded_random:
            return "seeded-random";
    }
    return "zero";
}

void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ParseError(section + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; }))
            throw ParseError("unknown key '" + (section.empty() ? "" : section + ".") + item.key() + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, const std::string& section, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(section + "." + key + ": value has the wrong type");
    }
}

void read_size(const json& obj, const char* key, const std::string& section, std::size_t& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_unsigned()) throw ParseError(section + "." + key + ": expected a non-negative integer");
    out = it->get<std::size_t>();
}

void read_seed(const json& obj, const char* key, const std::string& section, std::optional<std::uint64_t>& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_unsigned()) throw ParseError(section + "." + key + ": expected a non-negative integer");
    out = it->get<std::uint64_t>();
}

void parse_problem(const json& j, ProblemConfig& p) {
    const std::string sec = "problem";
    if (!j.is_object()) throw ParseError("problem: expected a JSON object");
    read(j, "kind", sec, p.kind);
    const auto names = builtin_problem_names();
    if (std::find(names.begin(), names.end(), p.kind) == names.end())
        throw ParseError("problem.kind: unknown problem '" + p.kind + "'");

    if (p.kind == "lasso")
        check_keys(j, sec, {"kind", "seed", "partition", "init", "z0", "A", "b", "lambda", "rows", "cols", "nonzeros",
                            "noise", "lambda_ratio"});
    else if (p.kind == "box_cubic")
        check_keys(j, sec, {"kind", "seed", "partition", "init", "z0", "c", "lower", "upper"});
    else if (p.kind == "signed_sqrt")
        check_keys(j, sec, {"kind", "seed", "partition", "init", "z0", "c"});
    else
        check_keys(j, sec, {"kind", "seed", "partition", "init", "z0", "dim", "m1", "m2", "lambda", "skew_scale",
                            "shift_scale", "identity_maps"});

    read_seed(j, "seed", sec, p.seed);
    if (j.contains("A")) {
        std::vector<std::vector<double>> a;
        read(j, "A", sec, a);
        p.a = a;
    }
    if (j.contains("b")) {
        std::vector<double> b;
        read(j, "b", sec, b);
        p.b = b;
    }
    if (j.contains("lambda")) {
        double l = 0;
        read(j, "lambda", sec, l);
        p.lambda = l;
    }
    if (p.kind == "lasso" && (p.a.has_value() != p.b.has_value() || p.a.has_value() != p.lambda.has_value()))
        throw ParseError("problem: an explicit lasso needs all of A, b and lambda");
    read_size(j, "rows", sec, p.rows);
    read_size(j, "cols", sec, p.cols);
    read_size(j, "nonzeros", sec, p.nonzeros);
    read(j, "noise", sec, p.noise);
    read(j, "lambda_ratio", sec, p.lambda_ratio);
    read(j, "c", sec, p.c);
    read(j, "lower", sec, p.lower);
    read(j, "upper", sec, p.upper);
    read_size(j, "dim", sec, p.dim);
    read_size(j, "m1", sec, p.m1);
    read_size(j, "m2", sec, p.m2);
    read(j, "skew_scale", sec, p.skew_scale);
    read(j, "shift_scale", sec, p.shift_scale);
    read(j, "identity_maps", sec, p.identity_maps);
    read(j, "z0", sec, p.z0);

    if (j.contains("partition")) {
        std::vector<std::string> kinds;
        read(j, "partition", sec, kinds);
        p.partition.clear();
        for (const auto& k : kinds) {
            if (k == "forward")
                p.partition.push_back(BlockKind::forward);
            else if (k == "backward")
                p.partition.push_back(BlockKind::backward);
            else
                throw ParseError("problem.partition: entries must be \"forward\" or \"backward\"");
        }
        if (p.partition.size() != p.num_blocks())
            throw ParseError("problem.partition: expected " + std::to_string(p.num_blocks()) + " entries");
    }
    if (j.contains("init")) {
        std::string init;
        read(j, "init", sec, init);
        if (init == "reference")
            p.start_at_reference = true;
        else if (init == "origin")
            p.start_at_reference = false;
        else
            throw ParseError("problem.init: expected \"origin\" or \"reference\"");
    }
    if (!p.z0.empty() && p.start_at_reference) throw ParseError("problem.z0: cannot be combined with init = reference");
    if (!(p.lambda_ratio > 0.0)) throw ParseError("problem.lambda_ratio must be > 0");
    if (!(p.noise >= 0.0)) throw ParseError("problem.noise must be >= 0");
}

void parse_engine(const json& j, EngineConfig& e) {
    const std::string sec = "engine";
    check_keys(j, sec, {"gamma", "beta", "beta_lo", "beta_hi", "nu", "delta", "max_backtracks", "rho", "rho_lo",
                        "rho_hi", "tol_primal", "tol_dual", "max_iters", "quickstop_eps", "pi_zero_eps",
                        "parallel_blocks", "alpha_scale"});
    read(j, "gamma", sec, e.gamma);
    read(j, "beta", sec, e.beta);
    read(j, "beta_lo", sec, e.beta_lo);
    read(j, "beta_hi", sec, e.beta_hi);
    read(j, "nu", sec, e.nu);
    read(j, "delta", sec, e.delta);
    read(j, "max_backtracks", sec, e.max_backtracks);
    if (auto it = j.find("rho"); it != j.end()) {
        if (it->is_number())
            e.rho = {it->get<double>()};
        else
            read(j, "rho", sec, e.rho);
    }
    read(j, "rho_lo", sec, e.rho_lo);
    read(j, "rho_hi", sec, e.rho_hi);
    read(j, "tol_primal", sec, e.tol_primal);
    read(j, "tol_dual", sec, e.tol_dual);
    read(j, "max_iters", sec, e.max_iters);
    read(j, "quickstop_eps", sec, e.quickstop_eps);
    read(j, "pi_zero_eps", sec, e.pi_zero_eps);
    read(j, "parallel_blocks", sec, e.parallel_blocks);
    read(j, "alpha_scale", sec, e.alpha_scale);
}

void parse_errors(const json& j, RunConfig& cfg) {
    const std::string sec = "errors";
    check_keys(j, sec, {"sigma", "mode", "magnitude", "seed"});
    read(j, "sigma", sec, cfg.errors.sigma);
    read(j, "magnitude", sec, cfg.errors.magnitude);
    read_seed(j, "seed", sec, cfg.error_seed);
    if (j.contains("mode")) {
        std::string mode;
        read(j, "mode", sec, mode);
        if (mode == "none")
            cfg.errors.mode = ErrorMode::none;
        else if (mode == "seeded-random")
            cfg.errors.mode = ErrorMode::seeded_random;
        else
            throw ParseError("errors.mode: expected \"none\" or \"seeded-random\"");
    }
}

void parse_schedule(const json& j, RunConfig& cfg) {
    const std::string sec = "schedule";
    check_keys(j, sec, {"kind", "block_size", "p_select", "seed", "M", "D", "delay", "delay_d", "delay_seed"});
    SchedulePolicy& s = cfg.schedule;
    if (j.contains("kind")) {
        std::string kind;
        read(j, "kind", sec, kind);
        if (kind == "full")
            s.kind = SelectionKind::full;
        else if (kind == "round-robin")
            s.kind = SelectionKind::round_robin;
        else if (kind == "seeded-random")
            s.kind = SelectionKind::seeded_random;
        else
            throw ParseError("schedule.kind: expected \"full\", \"round-robin\" or \"seeded-random\"");
    }
    read_size(j, "block_size", sec, s.block_size);
    read(j, "p_select", sec, s.p_select);
    read_seed(j, "seed", sec, cfg.schedule_seed);
    read_size(j, "M", sec, s.coverage_window);
    read_size(j, "D", sec, s.max_delay);
    if (j.contains("delay")) {
        std::string kind;
        read(j, "delay", sec, kind);
        if (kind == "zero")
            s.delay_kind = DelayKind::zero;
        else if (kind == "fixed")
            s.delay_kind = DelayKind::fixed;
        else if (kind == "seeded-random")
            s.delay_kind = DelayKind::seeded_random;
        else
            throw ParseError("schedule.delay: expected \"zero\", \"fixed\" or \"seeded-random\"");
    }
    read_size(j, "delay_d", sec, s.fixed_delay);
    read_seed(j, "delay_seed", sec, cfg.delay_seed);
}

}  // namespace

SchedulePolicy RunConfig::schedule_policy() const {
    SchedulePolicy p = schedule;
    p.seed = schedule_seed.value_or(seed + 101);
    p.delay_seed = delay_seed.value_or(seed + 202);
    return p;
}

ErrorPolicy RunConfig::error_policy() const {
    ErrorPolicy e = errors;
    e.seed = error_seed.value_or(seed + 303);
    return e;
}

void validate_config(const RunConfig& cfg) {
    const std::size_t n = cfg.problem.num_blocks();
    try {
        cfg.engine.validate(n);
        cfg.errors.validate();
        cfg.schedule.validate(n);
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"seed", "problem", "engine", "errors", "schedule", "output"});
    RunConfig cfg;
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_unsigned()) throw ParseError("seed: expected a non-negative integer");
        cfg.seed = it->get<std::uint64_t>();
    }
    if (!j.contains("problem")) throw ParseError("missing required key 'problem'");
    parse_problem(j["problem"], cfg.problem);
    if (j.contains("engine")) parse_engine(j["engine"], cfg.engine);
    if (j.contains("errors")) parse_errors(j["errors"], cfg);
    if (j.contains("schedule")) parse_schedule(j["schedule"], cfg);
    if (j.contains("output")) {
        check_keys(j["output"], "output", {"trace", "summary"});
        read(j["output"], "trace", "output", cfg.trace_path);
        read(j["output"], "summary", "output", cfg.summary_path);
    }
    validate_config(cfg);
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;

    const ProblemConfig& p = cfg.problem;
    json pj;
    pj["kind"] = p.kind;
    if (p.seed) pj["seed"] = *p.seed;
    if (!p.partition.empty()) {
        json parts = json::array();
        for (auto k : p.partition) parts.push_back(to_string(k));
        pj["partition"] = parts;
    }
    pj["init"] = p.start_at_reference ? "reference" : "origin";
    if (!p.z0.empty()) pj["z0"] = p.z0;
    if (p.kind == "lasso") {
        if (p.a) {
            pj["A"] = *p.a;
            pj["b"] = *p.b;
            pj["lambda"] = *p.lambda;
        }
        pj["rows"] = p.rows;
        pj["cols"] = p.cols;
        pj["nonzeros"] = p.nonzeros;
        pj["noise"] = p.noise;
        pj["lambda_ratio"] = p.lambda_ratio;
    } else if (p.kind == "box_cubic") {
        pj["c"] = p.c;
        pj["lower"] = p.lower;
        pj["upper"] = p.upper;
    } else if (p.kind == "signed_sqrt") {
        pj["c"] = p.c;
    } else {
        pj["dim"] = p.dim;
        pj["m1"] = p.m1;
        pj["m2"] = p.m2;
        if (p.lambda) pj["lambda"] = *p.lambda;
        pj["skew_scale"] = p.skew_scale;
        pj["shift_scale"] = p.shift_scale;
        pj["identity_maps"] = p.identity_maps;
    }
    j["problem"] = pj;

    const EngineConfig& e = cfg.engine;
    j["engine"] = {{"gamma", e.gamma},
                   {"beta", e.beta},
                   {"beta_lo", e.beta_lo},
                   {"beta_hi", e.beta_hi},
                   {"nu", e.nu},
                   {"delta", e.delta},
                   {"max_backtracks", e.max_backtracks},
                   {"rho", e.rho},
                   {"rho_lo", e.rho_lo},
                   {"rho_hi", e.rho_hi},
                   {"tol_primal", e.tol_primal},
                   {"tol_dual", e.tol_dual},
                   {"max_iters", e.max_iters},
                   {"quickstop_eps", e.quickstop_eps},
                   {"pi_zero_eps", e.pi_zero_eps},
                   {"parallel_blocks", e.parallel_blocks},
                   {"alpha_scale", e.alpha_scale}};

    json ej = {{"sigma", cfg.errors.sigma},
               {"mode", cfg.errors.mode == ErrorMode::none ? "none" : "seeded-random"},
               {"magnitude", cfg.errors.magnitude}};
    if (cfg.error_seed) ej["seed"] = *cfg.error_seed;
    j["errors"] = ej;

    const SchedulePolicy& s = cfg.schedule;
    json sj = {{"kind", kind_name(s.kind)}, {"block_size", s.block_size}, {"p_select", s.p_select},
               {"M", s.coverage_window},    {"D", s.max_delay},           {"delay", delay_name(s.delay_kind)},
               {"delay_d", s.fixed_delay}};
    if (cfg.schedule_seed) sj["seed"] = *cfg.schedule_seed;
    if (cfg.delay_seed) sj["delay_seed"] = *cfg.delay_seed;
    j["schedule"] = sj;

    j["output"] = {{"trace", cfg.trace_path}, {"summary", cfg.summary_path}};
    return j.dump(2);
}

ProblemInstance build_problem(const RunConfig& cfg) {
    const ProblemConfig& p = cfg.problem;
    const std::uint64_t seed = cfg.problem_seed();
    ProblemInstance inst;
    if (p.kind == "lasso") {
        if (p.a) {
            inst = make_lasso(Matrix::from_rows(*p.a), Vec(*p.b), *p.lambda);
            inst.seed = seed;
        } else {
            inst = make_random_lasso(seed, {p.rows, p.cols, p.nonzeros, p.noise, p.lambda_ratio});
        }
    } else if (p.kind == "box_cubic") {
        if (p.c.empty() && p.lower.empty() && p.upper.empty()) {
            inst = make_builtin("box_cubic", seed);
        } else {
            if (p.c.empty()) throw ConfigError("problem.c is required when box bounds are given");
            const Vec c(p.c);
            const Vec lo = p.lower.empty() ? Vec::constant(c.size(), -1.5) : Vec(p.lower);
            const Vec hi = p.upper.empty() ? Vec::constant(c.size(), 1.5) : Vec(p.upper);
            inst = make_box_cubic(c, lo, hi);
        }
        inst.seed = seed;
    } else if (p.kind == "signed_sqrt") {
        inst = p.c.empty() ? make_builtin("signed_sqrt", seed) : make_signed_sqrt(Vec(p.c));
        inst.seed = seed;
    } else if (p.kind == "skew_composed") {
        SkewComposedOptions opts;
        opts.dim = p.dim;
        opts.m1 = p.m1;
        opts.m2 = p.m2;
        if (p.lambda) opts.lambda = *p.lambda;
        opts.skew_scale = p.skew_scale;
        opts.shift_scale = p.shift_scale;
        opts.identity_maps = p.identity_maps;
        inst = make_skew_composed(seed, opts);
    } else {
        throw ConfigError("unknown problem kind '" + p.kind + "'");
    }
    if (!p.partition.empty()) inst.spec.partition = p.partition;
    if (p.start_at_reference) start_at_reference(inst);
    if (!p.z0.empty()) {
        if (p.z0.size() != inst.spec.primal.dim)
            throw ConfigError("problem.z0 must have " + std::to_string(inst.spec.primal.dim) + " entries");
        inst.spec.initial.z = Vec(p.z0);
    }
    inst.spec.validate();
    return inst;
}

}  // namespace psplit
