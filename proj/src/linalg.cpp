#include "psplit/linalg.hpp"

#include <cmath>
#include <string>

#include "psplit/kernels.hpp"

namespace psplit {

namespace {

void check_finite(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw NonFiniteValue("non-finite entry at index " + std::to_string(i));
    }
}

std::string dims(std::size_t a, std::size_t b) {
    return std::to_string(a) + " vs " + std::to_string(b);
}

}  // namespace

Space::Space(std::size_t d) : dim(d) {
    if (d == 0) throw StructuralError("space dimension must be at least 1");
}

Vec::Vec(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw StructuralError("Vec must have at least one entry");
    check_finite(entries_);
}

Vec::Vec(std::initializer_list<double> entries) : Vec(std::vector<double>(entries)) {}

Vec Vec::zeros(std::size_t dim) { return Vec(std::vector<double>(dim, 0.0)); }

Vec Vec::constant(std::size_t dim, double value) { return Vec(std::vector<double>(dim, value)); }

void require_same_size(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size())
        throw StructuralError(std::string(what) + ": dimension mismatch " + dims(a.size(), b.size()));
}

Vec operator+(const Vec& a, const Vec& b) {
    require_same_size(a, b, "operator+");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return Vec(std::move(out));
}

Vec operator-(const Vec& a, const Vec& b) {
    require_same_size(a, b, "operator-");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return Vec(std::move(out));
}

Vec operator-(const Vec& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
    return Vec(std::move(out));
}

Vec operator*(double s, const Vec& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return Vec(std::move(out));
}

Vec axpy(const Vec& a, double s, const Vec& b) {
    require_same_size(a, b, "axpy");
    std::vector<double> out(a.entries());
    kernels::axpy(s, b.span(), out);
    return Vec(std::move(out));
}

double dot(const Vec& a, const Vec& b) {
    require_same_size(a, b, "dot");
    return kernels::dot(a.span(), b.span());
}

double squared_norm(const Vec& a) { return kernels::squared_norm(a.span()); }

double norm(const Vec& a) { return std::sqrt(squared_norm(a)); }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (rows == 0 || cols == 0) throw StructuralError("matrix must be non-empty");
    if (data_.size() != rows * cols)
        throw StructuralError("matrix data size " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    check_finite(data_);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw StructuralError("matrix must be non-empty");
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw StructuralError("ragged matrix rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), cols, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
    std::vector<double> data(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
    return Matrix(n, n, std::move(data));
}

Matrix Matrix::transpose() const {
    std::vector<double> t(data_.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = data_[i * cols_ + j];
    return Matrix(cols_, rows_, std::move(t));
}

Vec operator*(const Matrix& m, const Vec& x) {
    if (x.size() != m.cols()) throw StructuralError("matrix-vector product: " + dims(m.cols(), x.size()));
    std::vector<double> y(m.rows());
    kernels::gemv(m.rows(), m.cols(), m.data(), x.span(), y);
    return Vec(std::move(y));
}

Vec transpose_times(const Matrix& m, const Vec& y) {
    if (y.size() != m.rows()) throw StructuralError("transpose product: " + dims(m.rows(), y.size()));
    std::vector<double> x(m.cols());
    kernels::gemv_t(m.rows(), m.cols(), m.data(), y.span(), x);
    return Vec(std::move(x));
}

LinearMap LinearMap::identity(std::size_t dim) {
    (void)Space{dim};
    return LinearMap(Identity{dim});
}

LinearMap LinearMap::diagonal(std::vector<double> diag) {
    check_finite(diag);
    (void)Space{diag.size()};
    return LinearMap(Diagonal{std::move(diag)});
}

LinearMap LinearMap::dense(Matrix m) { return LinearMap(std::move(m)); }

Space LinearMap::domain() const {
    if (auto* id = std::get_if<Identity>(&rep_)) return Space{id->dim};
    if (auto* dg = std::get_if<Diagonal>(&rep_)) return Space{dg->diag.size()};
    return Space{std::get<Dense>(rep_).cols()};
}

Space LinearMap::codomain() const {
    if (auto* m = std::get_if<Dense>(&rep_)) return Space{m->rows()};
    return domain();
}

Vec LinearMap::apply(const Vec& x) const {
    if (x.size() != domain().dim) throw StructuralError("LinearMap::apply: " + dims(domain().dim, x.size()));
    if (std::holds_alternative<Identity>(rep_)) return x;
    if (auto* dg = std::get_if<Diagonal>(&rep_)) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = dg->diag[i] * x[i];
        return Vec(std::move(out));
    }
    return std::get<Dense>(rep_) * x;
}

Vec LinearMap::apply_adjoint(const Vec& y) const {
    if (y.size() != codomain().dim)
        throw StructuralError("LinearMap::apply_adjoint: " + dims(codomain().dim, y.size()));
    if (auto* m = std::get_if<Dense>(&rep_)) return transpose_times(*m, y);
    return apply(y);
}

Matrix LinearMap::to_dense() const {
    if (auto* m = std::get_if<Dense>(&rep_)) return *m;
    const std::size_t n = domain().dim;
    std::vector<double> data(n * n, 0.0);
    const auto* dg = std::get_if<Diagonal>(&rep_);
    for (std::size_t i = 0; i < n; ++i) data[i * n + i] = dg ? dg->diag[i] : 1.0;
    return Matrix(n, n, std::move(data));
}

PrimalDualPoint operator-(const PrimalDualPoint& a, const PrimalDualPoint& b) {
    if (a.w.size() != b.w.size()) throw StructuralError("point difference: block count mismatch");
    PrimalDualPoint out{a.z - b.z, {}};
    out.w.reserve(a.w.size());
    for (std::size_t i = 0; i < a.w.size(); ++i) out.w.push_back(a.w[i] - b.w[i]);
    return out;
}

PrimalDualPoint axpy(const PrimalDualPoint& a, double s, const PrimalDualPoint& b) {
    if (a.w.size() != b.w.size()) throw StructuralError("point axpy: block count mismatch");
    PrimalDualPoint out{axpy(a.z, s, b.z), {}};
    out.w.reserve(a.w.size());
    for (std::size_t i = 0; i < a.w.size(); ++i) out.w.push_back(axpy(a.w[i], s, b.w[i]));
    return out;
}

void require_shape(const PrimalDualPoint& p, std::span<const Space> dual_spaces, Space primal) {
    if (p.z.space() != primal) throw StructuralError("primal block has wrong dimension");
    if (p.w.size() != dual_spaces.size())
        throw StructuralError("expected " + std::to_string(dual_spaces.size()) + " dual blocks, got " +
                              std::to_string(p.w.size()));
    for (std::size_t i = 0; i < p.w.size(); ++i)
        if (p.w[i].space() != dual_spaces[i])
            throw StructuralError("dual block " + std::to_string(i + 1) + " has wrong dimension");
}

Vec derived_wn(const PrimalDualPoint& p, std::span<const LinearMap> maps) {
    if (maps.size() != p.w.size())
        throw StructuralError("derived_wn: " + std::to_string(maps.size()) + " maps for " +
                              std::to_string(p.w.size()) + " dual blocks");
    std::vector<double> acc(p.z.size(), 0.0);
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].domain() != p.z.space()) throw StructuralError("derived_wn: map domain is not H_0");
        const Vec g = maps[i].apply_adjoint(p.w[i]);
        kernels::axpy(-1.0, g.span(), acc);
    }
    return Vec(std::move(acc));
}

double gamma_inner(const PrimalDualPoint& p, const PrimalDualPoint& q, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (p.w.size() != q.w.size()) throw StructuralError("gamma_inner: block count mismatch");
    double s = gamma * dot(p.z, q.z);
    for (std::size_t i = 0; i < p.w.size(); ++i) s += dot(p.w[i], q.w[i]);
    return s;
}

double gamma_norm(const PrimalDualPoint& p, double gamma) { return std::sqrt(gamma_inner(p, p, gamma)); }

}  // namespace psplit
