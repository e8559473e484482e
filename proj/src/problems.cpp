#include "psplit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "oracles.hpp"

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

Matrix from_eigen(const Eigen::MatrixXd& m) {
    std::vector<double> data(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            data[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return Matrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), std::move(data));
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
    return m;
}

PrimalDualPoint zero_point(const ProblemSpec& spec) {
    PrimalDualPoint p{Vec::zeros(spec.primal.dim), {}};
    for (const auto& s : spec.dual_spaces()) p.w.push_back(Vec::zeros(s.dim));
    return p;
}

}  // namespace

double kkt_residual(const ProblemSpec& spec, const Vec& z, const std::vector<Vec>& w) {
    const PrimalDualPoint p{z, w};
    require_shape(p, spec.dual_spaces(), spec.primal);
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.num_blocks(); ++i) {
        const Vec gz = spec.apply_map(i, z);
        const Vec wi = spec.dual_block(i, p);
        const MonotoneOperator& t = spec.operators[i];
        double r = 0.0;
        if (spec.partition[i] == BlockKind::forward)
            r = norm(t.forward(gz) - wi);
        else
            r = norm(gz - t.prox(1.0, gz + wi).x);
        worst = std::max(worst, r);
    }
    return worst;
}

ProblemInstance make_lasso(const Matrix& a, const Vec& b, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("lasso: lambda must be > 0");
    if (b.size() != a.rows()) throw StructuralError("lasso: b must have one entry per row of A");

    ProblemInstance inst;
    ProblemSpec& spec = inst.spec;
    spec.name = "lasso";
    spec.primal = Space{a.cols()};
    spec.maps.push_back(LinearMap::dense(a));
    spec.operators.push_back(affine_monotone(Matrix::identity(a.rows()), -b));
    spec.operators.push_back(l1_subdifferential(a.cols(), lambda));
    spec.partition = {BlockKind::forward, BlockKind::backward};
    spec.initial = zero_point(spec);

    const Eigen::MatrixXd ae = to_eigen(a);
    const Eigen::VectorXd be = to_eigen(b);
    const auto sol = oracle::solve_lasso(ae, be, lambda);
    ReferenceSolution& ref = inst.reference;
    ref.z_star = from_eigen(sol.z);
    ref.w_star = {from_eigen(Eigen::VectorXd(ae * sol.z - be))};
    ref.provenance = "FISTA with restart to gradient-map norm <= 1e-10" +
                     std::string(sol.polished ? ", polished by a support solve" : "");
    ref.accuracy = 1e-8;
    return inst;
}

ProblemInstance make_random_lasso(std::uint64_t seed, const RandomLassoOptions& opts) {
    if (opts.nonzeros > opts.cols) throw ConfigError("lasso: more nonzeros than columns");
    std::mt19937_64 rng(seed);
    const auto m = static_cast<Eigen::Index>(opts.rows);
    const auto d = static_cast<Eigen::Index>(opts.cols);
    const Eigen::MatrixXd a = gaussian(rng, m, d, 1.0 / std::sqrt(static_cast<double>(m)));
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(d);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) idx[static_cast<std::size_t>(j)] = j;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> mag(1.0, 2.0);
    std::bernoulli_distribution sign;
    for (std::size_t j = 0; j < opts.nonzeros; ++j) truth[idx[j]] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    const Eigen::VectorXd b = a * truth + gaussian(rng, m, 1, opts.noise);
    const double lambda = opts.lambda_ratio * (a.transpose() * b).cwiseAbs().maxCoeff();
    ProblemInstance inst = make_lasso(from_eigen(a), from_eigen(Eigen::VectorXd(b)), lambda);
    inst.seed = seed;
    return inst;
}

ProblemInstance make_box_cubic(const Vec& c, const Vec& lower, const Vec& upper) {
    require_same_size(c, lower, "box_cubic");
    require_same_size(c, upper, "box_cubic");
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!(lower[i] < upper[i])) throw ConfigError("box_cubic: need l < u componentwise");

    ProblemInstance inst;
    ProblemSpec& spec = inst.spec;
    spec.name = "box_cubic";
    spec.primal = c.space();
    spec.maps.push_back(LinearMap::identity(c.size()));
    spec.operators.push_back(shifted(cube(c.size()), c));
    spec.operators.push_back(box_normal_cone(lower, upper));
    spec.partition = {BlockKind::forward, BlockKind::backward};
    spec.initial = zero_point(spec);

    std::vector<double> z(c.size()), w(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        z[i] = std::clamp(std::cbrt(c[i]), lower[i], upper[i]);
        w[i] = z[i] * z[i] * z[i] - c[i];
    }
    inst.reference = {Vec(z), {Vec(w)}, "componentwise clamp of the real cube root", 1e-8};
    return inst;
}

ProblemInstance make_signed_sqrt(const Vec& c) {
    ProblemInstance inst;
    ProblemSpec& spec = inst.spec;
    spec.name = "signed_sqrt";
    spec.primal = c.space();
    spec.maps.push_back(LinearMap::identity(c.size()));
    spec.operators.push_back(
        shifted(sum(signed_sqrt(c.size()), affine_monotone(Matrix::identity(c.size()), Vec::zeros(c.size()))), c));
    spec.operators.push_back(zero_op(c.size()));
    spec.partition = {BlockKind::forward, BlockKind::backward};
    spec.initial = zero_point(spec);

    std::vector<double> z(c.size()), w(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        z[i] = oracle::signed_sqrt_root(c[i]);
        w[i] = std::copysign(std::sqrt(std::abs(z[i])), z[i]) + z[i] - c[i];
    }
    inst.reference = {Vec(z), {Vec(w)}, "componentwise bisection to adjacent doubles", 1e-8};
    return inst;
}

ProblemInstance make_skew_composed(std::uint64_t seed, const SkewComposedOptions& opts) {
    if (opts.m2 == 0 || opts.m2 > 10) throw ConfigError("skew_composed: m2 must lie in [1, 10]");
    if (!(opts.lambda > 0.0)) throw ConfigError("skew_composed: lambda must be > 0");
    if (opts.identity_maps && (opts.m1 != opts.dim || opts.m2 != opts.dim))
        throw ConfigError("skew_composed: identity maps need m1 = m2 = dim");
    const auto d = static_cast<Eigen::Index>(opts.dim);
    const auto m1 = static_cast<Eigen::Index>(opts.m1);
    const auto m2 = static_cast<Eigen::Index>(opts.m2);

    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        std::mt19937_64 rng(seed + attempt);
        const Eigen::MatrixXd g1 =
            opts.identity_maps ? Eigen::MatrixXd::Identity(d, d) : gaussian(rng, m1, d, 1.0 / std::sqrt(double(d)));
        const Eigen::MatrixXd g2 =
            opts.identity_maps ? Eigen::MatrixXd::Identity(d, d) : gaussian(rng, m2, d, 1.0 / std::sqrt(double(d)));
        const Eigen::MatrixXd b = gaussian(rng, m1, m1, 1.0);
        const Eigen::MatrixXd s = opts.skew_scale * 0.5 * (b - b.transpose());
        const Eigen::MatrixXd cmat = gaussian(rng, d, d, 1.0 / std::sqrt(double(d)));
        const Eigen::MatrixXd p = cmat.transpose() * cmat + 0.5 * Eigen::MatrixXd::Identity(d, d);
        const Eigen::VectorXd b1 = opts.shift_scale * gaussian(rng, m1, 1, 1.0);
        const Eigen::VectorXd b3 = opts.shift_scale * gaussian(rng, d, 1, 1.0);

        const Eigen::MatrixXd k = g1.transpose() * s * g1 + p;
        const Eigen::VectorXd c = g1.transpose() * b1 + b3;
        if (std::abs(k.partialPivLu().determinant()) < 1e-12) continue;
        if (!opts.identity_maps && Eigen::FullPivLU<Eigen::MatrixXd>(g2).rank() < std::min(m2, d)) continue;
        const auto sol = oracle::solve_composed_l1(k, c, g2, opts.lambda);
        if (!(sol.violation <= 1e-9)) continue;

        ProblemInstance inst;
        inst.seed = seed + attempt;
        ProblemSpec& spec = inst.spec;
        spec.name = "skew_composed";
        spec.primal = Space{opts.dim};
        if (opts.identity_maps) {
            spec.maps = {LinearMap::identity(opts.dim), LinearMap::identity(opts.dim)};
        } else {
            spec.maps = {LinearMap::dense(from_eigen(g1)), LinearMap::dense(from_eigen(g2))};
        }
        spec.operators = {affine_monotone(from_eigen(s), from_eigen(Eigen::VectorXd(b1))),
                          l1_subdifferential(opts.m2, opts.lambda),
                          affine_monotone(from_eigen(p), from_eigen(Eigen::VectorXd(b3)))};
        spec.partition = {BlockKind::forward, BlockKind::backward, BlockKind::backward};
        spec.initial = zero_point(spec);

        const Eigen::VectorXd w1 = s * (g1 * sol.z) + b1;
        inst.reference = {from_eigen(sol.z),
                          {from_eigen(w1), from_eigen(sol.w)},
                          "active-set enumeration of the dual box problem",
                          1e-8};
        return inst;
    }
    throw ConfigError("skew_composed: no well-posed instance found near seed " + std::to_string(seed));
}

std::vector<std::string> builtin_problem_names() { return {"lasso", "box_cubic", "signed_sqrt", "skew_composed"}; }

ProblemInstance make_builtin(const std::string& name, std::uint64_t seed) {
    if (name == "lasso") return make_random_lasso(seed);
    if (name == "box_cubic")
        return make_box_cubic(Vec{8.0, -0.5, 2.0, -27.0, 0.1}, Vec::constant(5, -1.5), Vec::constant(5, 1.5));
    if (name == "signed_sqrt") return make_signed_sqrt(Vec{0.0, 2.0, 6.0, -2.0});
    if (name == "skew_composed") return make_skew_composed(seed);
    throw ConfigError("unknown problem kind '" + name + "'");
}

void start_at_reference(ProblemInstance& inst) { inst.spec.initial = inst.reference.point(); }

}  // namespace psplit
