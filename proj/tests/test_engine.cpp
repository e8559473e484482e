#include <doctest.h>

#include <cmath>
#include <random>

#include "psplit/audit.hpp"
#include "psplit/engine.hpp"
#include "psplit/errors.hpp"
#include "psplit/problems.hpp"
#include "reference_sync.hpp"
#include "test_util.hpp"

using namespace psplit;

namespace {

ProblemSpec scalar_pair(MonotoneOperator t1, BlockKind k1, MonotoneOperator t2, BlockKind k2,
                        PrimalDualPoint start = {Vec{0.0}, {Vec{0.0}}}) {
    ProblemSpec pb;
    pb.name = "scalar_pair";
    pb.primal = Space{1};
    pb.maps = {LinearMap::identity(1)};
    pb.operators = {std::move(t1), std::move(t2)};
    pb.partition = {k1, k2};
    pb.initial = std::move(start);
    return pb;
}

const MonotoneOperator& identity_op() {
    static const MonotoneOperator t = affine_monotone(Matrix::identity(1), Vec{0.0});
    return t;
}

}  // namespace

TEST_CASE("backward_update examples") {
    SUBCASE("soft threshold") {
        const auto r = backward_update(l1_subdifferential(1, 1.0), Vec{2.0}, Vec{0.0}, 1.0, nullptr);
        CHECK(r.prox.x == Vec{1.0});
        CHECK(r.prox.y == Vec{1.0});
        CHECK(r.error == Vec{0.0});
    }
    SUBCASE("zero operator") {
        const auto r = backward_update(zero_op(2), Vec{1.0, -1.0}, Vec{0.5, 2.0}, 2.0, nullptr);
        CHECK(r.prox.x == Vec{2.0, 3.0});
        CHECK(r.prox.y == Vec{0.0, 0.0});
    }
    SUBCASE("box") {
        const auto r = backward_update(box_normal_cone(Vec{-1.0}, Vec{1.0}), Vec{2.0}, Vec{0.5}, 2.0, nullptr);
        CHECK(r.input == Vec{3.0});
        CHECK(r.prox.x == Vec{1.0});
        CHECK(r.prox.y == Vec{1.0});
    }
}

TEST_CASE("forward_update_with_backtrack examples") {
    SUBCASE("quick stop") {
        const auto r = forward_update_with_backtrack(identity_op(), Vec{1.0}, Vec{1.0}, 1.0, {0.5, 1.0, 200, 1e-14});
        CHECK(r.quick_stop);
        CHECK(r.backtracks == 0);
        CHECK(r.x == Vec{1.0});
        CHECK(r.y == Vec{1.0});
        CHECK(r.rho_hat == 1.0);
    }
    SUBCASE("identity, delta 0.5") {
        const auto r = forward_update_with_backtrack(identity_op(), Vec{1.0}, Vec{0.0}, 1.0, {0.5, 0.5, 200, 1e-14});
        CHECK(r.backtracks == 2);
        CHECK(std::abs(r.rho_hat - 0.5) <= 1e-12);
        CHECK(std::abs(r.x[0] - 0.5) <= 1e-12);
        CHECK(std::abs(r.y[0] - 0.5) <= 1e-12);
    }
    SUBCASE("cube, delta 1") {
        const auto r = forward_update_with_backtrack(cube(1), Vec{1.0}, Vec{0.0}, 1.0, {0.5, 1.0, 200, 1e-14});
        CHECK(r.backtracks == 3);
        CHECK(std::abs(r.rho_hat - 0.25) <= 1e-12);
        CHECK(std::abs(r.x[0] - 0.75) <= 1e-12);
        CHECK(std::abs(r.y[0] - 0.421875) <= 1e-12);
    }
    SUBCASE("cap exceeded is an assumption violation") {
        CHECK_THROWS_AS(forward_update_with_backtrack(identity_op(), Vec{1.0}, Vec{0.0}, 1.0, {0.5, 0.5, 1, 1e-14}),
                        AssumptionViolation);
    }
    SUBCASE("prox-only operator cannot run forward") {
        CHECK_THROWS_AS(forward_update_with_backtrack(l1_subdifferential(1, 1.0), Vec{1.0}, Vec{0.0}, 1.0, {}),
                        ContractError);
    }
}

TEST_CASE("accepted forward steps satisfy the acceptance test and the stepsize law") {
    std::mt19937_64 rng(3);
    const std::vector<MonotoneOperator> ops{cube(3), signed_sqrt(3), shifted(cube(3), Vec{1.0, -2.0, 0.5}),
                                            gradient_quadratic(testing::random_matrix(rng, 4, 3),
                                                               testing::random_vec(rng, 4))};
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    for (const auto& t : ops) {
        for (int trial = 0; trial < 200; ++trial) {
            const Vec gz = testing::random_vec(rng, 3, 2.0);
            const Vec w = testing::random_vec(rng, 3, 2.0);
            const double nu = unif(rng), delta = 2 * unif(rng), rho0 = 4 * unif(rng);
            const auto r = forward_update_with_backtrack(t, gz, w, rho0, {nu, delta, 200, 1e-14});
            if (r.quick_stop) continue;
            const Vec step = gz - r.x;
            CHECK(delta * squared_norm(step) - dot(step, r.y - w) <= 0.0);
            CHECK(r.rho_hat <= rho0);
            CHECK(std::abs(r.rho_hat - rho0 * std::pow(nu, r.backtracks - 1)) <= 1e-12 * rho0);
            CHECK(norm(r.x - (gz - r.rho_hat * (r.zeta - w))) <= 1e-10);
            CHECK(r.y == forward_eval(t, r.x));
        }
    }
}

TEST_CASE("evaluate_separator examples") {
    const auto pb = scalar_pair(identity_op(), BlockKind::forward, zero_op(1), BlockKind::backward);
    SUBCASE("consensus with zero dual sum") {
        const std::vector<BlockState> blocks{{Vec{1.0}, Vec{2.0}}, {Vec{1.0}, Vec{-2.0}}};
        const auto sep = evaluate_separator(pb, blocks, PrimalDualPoint{Vec{0.0}, {Vec{0.0}}}, 1.0, 1.0);
        CHECK(sep.u[0] == Vec{0.0});
        CHECK(sep.v == Vec{0.0});
        CHECK(sep.pi == 0.0);
        CHECK(sep.alpha == 0.0);
    }
    const std::vector<BlockState> blocks{{Vec{0.0}, Vec{1.0}}, {Vec{1.0}, Vec{0.0}}};
    SUBCASE("negative phi") {
        const PrimalDualPoint p{Vec{2.0}, {Vec{3.0}}};
        const auto sep = evaluate_separator(pb, blocks, p, 1.0, 1.0);
        CHECK(sep.u[0] == Vec{-1.0});
        CHECK(sep.v == Vec{1.0});
        CHECK(sep.pi == 2.0);
        CHECK(sep.phi_at_p == -1.0);
        CHECK(sep.alpha == 0.0);
        CHECK(affine_value(pb, blocks, p) == -1.0);
        CHECK(project(p, sep, 1.0).z == p.z);
    }
    SUBCASE("positive phi and exact projection") {
        const PrimalDualPoint p{Vec{2.0}, {Vec{-3.0}}};
        const auto sep = evaluate_separator(pb, blocks, p, 1.0, 1.0);
        CHECK(sep.phi_at_p == 5.0);
        CHECK(sep.alpha == 2.5);
        const auto next = project(p, sep, 1.0);
        CHECK(next.z == Vec{-0.5});
        CHECK(next.w[0] == Vec{-0.5});
        CHECK(affine_value(pb, blocks, next) == 0.0);
    }
    SUBCASE("beta 2 is rejected by validation") {
        EngineConfig cfg;
        cfg.beta = 2.0;
        cfg.beta_hi = 2.0;
        CHECK_THROWS_AS(cfg.validate(2), ConfigError);
    }
}

TEST_CASE("affine_value at the candidate built from consensus blocks is zero") {
    const auto inst = make_skew_composed(4);
    const auto& pb = inst.spec;
    std::mt19937_64 rng(8);
    const Vec xn = testing::random_vec(rng, pb.primal.dim);
    std::vector<BlockState> blocks;
    PrimalDualPoint q{xn, {}};
    for (std::size_t i = 0; i < pb.num_blocks(); ++i) {
        const Vec x = pb.apply_map(i, xn);
        blocks.push_back({x, testing::random_vec(rng, x.size())});
        if (i + 1 < pb.num_blocks()) q.w.push_back(blocks.back().y);
    }
    // the last dual is derived, so make y_n consistent with it
    blocks.back().y = pb.dual_block(pb.num_blocks() - 1, q);
    CHECK(std::abs(affine_value(pb, blocks, q)) <= 1e-12);
}

TEST_CASE("pi equals the squared gamma-norm of the gradient; gradient matches directional derivatives") {
    std::mt19937_64 rng(19);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto inst = make_skew_composed(seed);
        const auto& pb = inst.spec;
        const auto duals = pb.dual_spaces();
        std::vector<std::size_t> ddims;
        for (auto s : duals) ddims.push_back(s.dim);
        for (double gamma : {0.3, 1.0, 7.0}) {
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<BlockState> blocks;
                for (std::size_t i = 0; i < pb.num_blocks(); ++i) {
                    const auto d = pb.block_space(i).dim;
                    blocks.push_back({testing::random_vec(rng, d), testing::random_vec(rng, d)});
                }
                const auto p = testing::random_point(rng, pb.primal.dim, ddims);
                const auto sep = evaluate_separator(pb, blocks, p, gamma, 1.0);
                const auto grad = separator_gradient(pb, blocks, gamma);
                const double g2 = gamma_inner(grad, grad, gamma);
                CHECK(std::abs(sep.pi - g2) <= 1e-10 * sep.pi);
                CHECK(std::abs(sep.phi_at_p - affine_value(pb, blocks, p)) <= 1e-10 * (1.0 + std::abs(sep.phi_at_p)));

                const auto dir = testing::random_point(rng, pb.primal.dim, ddims);
                const double lhs = affine_value(pb, blocks, axpy(p, 1.0, dir)) - affine_value(pb, blocks, p);
                const double rhs = gamma_inner(grad, dir, gamma);
                CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
            }
        }
    }
}

TEST_CASE("step examples") {
    SUBCASE("started at a KKT point terminates exactly") {
        auto inst = make_builtin("box_cubic", 1);
        start_at_reference(inst);
        const auto& ref = inst.reference;
        std::vector<BlockState> blocks;
        for (std::size_t i = 0; i < inst.spec.num_blocks(); ++i) {
            const Vec x = inst.spec.apply_map(i, ref.z_star);
            blocks.push_back({x, inst.spec.dual_block(i, ref.point()), 1.0});
        }
        Engine eng(inst.spec, EngineConfig{}, SchedulePolicy{}, {}, blocks);
        const auto out = eng.step();
        CHECK(out.status == RunStatus::exact_termination);
        REQUIRE(out.solution);
        CHECK(norm(out.solution->z - ref.z_star) <= 1e-12);
    }
    SUBCASE("non-positive phi leaves p unchanged") {
        const auto pb = scalar_pair(zero_op(1), BlockKind::backward, zero_op(1), BlockKind::backward);
        SchedulePolicy rr;
        rr.kind = SelectionKind::round_robin;
        std::vector<BlockState> blocks{{Vec{0.0}, Vec{0.0}}, {Vec{1.0}, Vec{1.0}}};
        Engine eng(pb, EngineConfig{}, rr, {}, blocks);
        const auto before = eng.point();
        const auto out = eng.step();
        CHECK(out.status == RunStatus::running);
        CHECK(eng.records().back().phi == -1.0);
        CHECK(eng.records().back().pi == 2.0);
        CHECK(eng.point().z == before.z);
        CHECK(eng.point().w == before.w);
    }
    SUBCASE("budget") {
        EngineConfig cfg;
        cfg.max_iters = 0;
        Engine eng(make_builtin("lasso", 1).spec, cfg, SchedulePolicy{});
        CHECK(eng.step().status == RunStatus::budget);
        const auto trace = eng.run();
        CHECK(trace.status == RunStatus::budget);
        CHECK(trace.records.empty());
    }
}

TEST_CASE("single-operator problems degenerate gracefully") {
    ProblemSpec pb;
    pb.name = "single";
    pb.primal = Space{2};
    pb.operators = {zero_op(2)};
    pb.partition = {BlockKind::backward};
    pb.initial = PrimalDualPoint{Vec{1.0, 2.0}, {}};
    Engine eng(pb, EngineConfig{}, SchedulePolicy{});
    const auto trace = eng.run();
    CHECK(trace.status == RunStatus::exact_termination);
    CHECK(trace.solution.z == Vec{1.0, 2.0});
}

TEST_CASE("run examples") {
    SUBCASE("lasso converges near the oracle") {
        const auto inst = make_builtin("lasso", 1);
        Engine eng(inst.spec, EngineConfig{}, SchedulePolicy{});
        const auto trace = eng.run();
        CHECK(trace.status == RunStatus::converged);
        CHECK(trace.records.back().max_primal_residual() <= 1e-6);
        CHECK(trace.records.back().max_dual_residual() <= 1e-6);
        CHECK(norm(trace.solution.z - inst.reference.z_star) <= 1e-4);
    }
    SUBCASE("merely continuous forward block") {
        auto inst = make_signed_sqrt(Vec{0.0, 2.0, 6.0});
        inst.spec.initial.z = Vec{3.0, -1.0, 0.5};
        Engine eng(inst.spec, EngineConfig{}, SchedulePolicy{});
        const auto trace = eng.run();
        CHECK(trace.status == RunStatus::converged);
        for (const auto& rec : trace.records) {
            CHECK(rec.stepsizes[0] > 0.0);
            CHECK(rec.backtracks[0] <= 200);
        }
    }
    SUBCASE("capability mismatch is a configuration error") {
        auto inst = make_builtin("box_cubic", 1);
        inst.spec.partition = {BlockKind::backward, BlockKind::backward};
        CHECK_THROWS_AS(Engine(inst.spec, EngineConfig{}, SchedulePolicy{}), ConfigError);
    }
    SUBCASE("backtracking cap reported as assumption violation") {
        EngineConfig cfg;
        cfg.max_backtracks = 1;
        cfg.rho = {100.0};
        Engine eng(make_builtin("box_cubic", 1).spec, cfg, SchedulePolicy{});
        CHECK(eng.run().status == RunStatus::assumption_violation);
    }
}

TEST_CASE("blocks outside I_k carry over bitwise") {
    const auto inst = make_builtin("skew_composed", 2);
    SchedulePolicy sched;
    sched.kind = SelectionKind::seeded_random;
    sched.p_select = 0.4;
    sched.seed = 6;
    sched.coverage_window = 4;
    sched.max_delay = 2;
    sched.delay_kind = DelayKind::seeded_random;
    sched.delay_seed = 4;
    EngineConfig cfg;
    cfg.max_iters = 200;
    Engine eng(inst.spec, cfg, sched);
    long checked = 0;
    eng.set_observer([&](const IterationView& v) {
        std::vector<char> sel(v.blocks.size(), 0);
        for (auto i : v.record.selected) sel[i] = 1;
        for (std::size_t i = 0; i < v.blocks.size(); ++i) {
            if (sel[i]) continue;
            CHECK(v.blocks[i] == v.previous_blocks[i]);
            ++checked;
        }
    });
    eng.run();
    CHECK(checked > 0);
}

TEST_CASE("full zero-delay engine matches a plain synchronous implementation bit for bit") {
    for (const auto& name : builtin_problem_names()) {
        for (bool parallel : {true, false}) {
            CAPTURE(name);
            CAPTURE(parallel);
            auto inst = make_builtin(name, 3);
            if (name == "signed_sqrt") inst.spec.initial.z = Vec{1.0, -0.5, 2.0, 0.25};
            EngineConfig cfg;
            cfg.tol_primal = cfg.tol_dual = 1e-300;
            cfg.max_iters = 80;
            cfg.parallel_blocks = parallel;
            Engine eng(inst.spec, cfg, SchedulePolicy{});
            const auto ref = testing::run_reference_sync(inst.spec, cfg, 80);
            for (const auto& it : ref) {
                const auto out = eng.step();
                const auto& rec = eng.records().back();
                CHECK(rec.phi == it.phi);
                CHECK(rec.pi == it.pi);
                if (out.status == RunStatus::exact_termination) break;
                CHECK(rec.alpha == it.alpha);
                CHECK(testing::to_arr(eng.point().z) == it.z);
                for (std::size_t i = 0; i < it.w.size(); ++i) CHECK(testing::to_arr(eng.point().w[i]) == it.w[i]);
                for (std::size_t i = 0; i < it.x.size(); ++i) {
                    CHECK(testing::to_arr(eng.blocks()[i].x) == it.x[i]);
                    CHECK(testing::to_arr(eng.blocks()[i].y) == it.y[i]);
                    CHECK(rec.backtracks[i] == it.backtracks[i]);
                }
            }
        }
    }
}

TEST_CASE("parallel and serial block loops give identical traces under async schedules and errors") {
    const auto inst = make_builtin("skew_composed", 5);
    SchedulePolicy sched;
    sched.kind = SelectionKind::seeded_random;
    sched.seed = 2;
    sched.coverage_window = 5;
    sched.max_delay = 3;
    sched.delay_kind = DelayKind::seeded_random;
    sched.delay_seed = 9;
    const ErrorPolicy errors{0.5, ErrorMode::seeded_random, 0.1, 77};
    EngineConfig a, b;
    a.max_iters = b.max_iters = 300;
    b.parallel_blocks = false;
    const auto ta = Engine(inst.spec, a, sched, errors).run();
    const auto tb = Engine(inst.spec, b, sched, errors).run();
    REQUIRE(ta.records.size() == tb.records.size());
    for (std::size_t k = 0; k < ta.records.size(); ++k) {
        CHECK(ta.records[k].phi == tb.records[k].phi);
        CHECK(ta.records[k].delays == tb.records[k].delays);
    }
    CHECK(ta.solution.z == tb.solution.z);
}

TEST_CASE("auditor passes on a delayed, inexact run and catches an over-relaxed projection") {
    SUBCASE("clean") {
        const auto inst = make_builtin("lasso", 2);
        SchedulePolicy sched;
        sched.kind = SelectionKind::seeded_random;
        sched.seed = 4;
        sched.coverage_window = 3;
        sched.max_delay = 2;
        sched.delay_kind = DelayKind::seeded_random;
        sched.delay_seed = 1;
        EngineConfig cfg;
        cfg.max_iters = 400;
        const ErrorPolicy errors{0.5, ErrorMode::seeded_random, 0.05, 3};
        Engine eng(inst.spec, cfg, sched, errors);
        InvariantAuditor aud(eng.problem(), cfg, errors.sigma, {inst.reference.point()});
        eng.set_observer(aud.observer());
        const auto trace = eng.run();
        aud.audit_schedule(trace.records, 3, 2);
        for (const auto& r : aud.results()) {
            CAPTURE(r.name);
            CAPTURE(r.detail);
            CHECK(r.passed());
        }
        CHECK(aud.result("error-bounds").evaluations > 0);
    }
    SUBCASE("mutation") {
        const auto inst = make_builtin("lasso", 1);
        EngineConfig cfg;
        cfg.beta = 1.9;
        cfg.beta_hi = 1.95;
        cfg.alpha_scale = 1.5;
        cfg.max_iters = 300;
        Engine eng(inst.spec, cfg, SchedulePolicy{});
        InvariantAuditor aud(eng.problem(), cfg, 0.0, {inst.reference.point()});
        eng.set_observer(aud.observer());
        eng.run();
        CHECK_FALSE(aud.result("fejer").passed());
    }
}
