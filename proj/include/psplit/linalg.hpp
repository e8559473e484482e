#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "psplit/errors.hpp"

namespace psplit {

/// Thrown when a NaN or Inf would enter a Vec.
class NonFiniteValue : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A finite-dimensional real space, identified by its dimension.
struct Space {
    std::size_t dim;

    explicit Space(std::size_t d);
    friend bool operator==(Space, Space) = default;
};

/// Dense real vector. Entries are always finite.
class Vec {
public:
    explicit Vec(std::vector<double> entries);
    Vec(std::initializer_list<double> entries);

    static Vec zeros(std::size_t dim);
    static Vec constant(std::size_t dim, double value);

    std::size_t size() const { return entries_.size(); }
    Space space() const { return Space{entries_.size()}; }

    double operator[](std::size_t i) const { return entries_[i]; }
    std::span<const double> span() const { return entries_; }
    const std::vector<double>& entries() const { return entries_; }

    friend bool operator==(const Vec&, const Vec&) = default;

private:
    std::vector<double> entries_;
};

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator-(const Vec& a);
Vec operator*(double s, const Vec& a);

/// a + s * b
Vec axpy(const Vec& a, double s, const Vec& b);

double dot(const Vec& a, const Vec& b);
double squared_norm(const Vec& a);
double norm(const Vec& a);

/// Throws StructuralError naming `what` when sizes differ.
void require_same_size(const Vec& a, const Vec& b, const char* what);

/// Dense row-major matrix.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const double> data() const { return data_; }

    Matrix transpose() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Vec operator*(const Matrix& m, const Vec& x);
/// m^T y
Vec transpose_times(const Matrix& m, const Vec& y);

/// A bounded linear map G : H_0 -> H_i with its adjoint.
class LinearMap {
public:
    struct Identity {
        std::size_t dim;
    };
    struct Diagonal {
        std::vector<double> diag;
    };
    using Dense = Matrix;

    static LinearMap identity(std::size_t dim);
    static LinearMap diagonal(std::vector<double> diag);
    static LinearMap dense(Matrix m);

    Space domain() const;
    Space codomain() const;

    Vec apply(const Vec& x) const;
    Vec apply_adjoint(const Vec& y) const;

    bool is_identity() const { return std::holds_alternative<Identity>(rep_); }
    Matrix to_dense() const;

private:
    explicit LinearMap(std::variant<Identity, Diagonal, Dense> rep) : rep_(std::move(rep)) {}
    std::variant<Identity, Diagonal, Dense> rep_;
};

/// p = (z, w_1, ..., w_{n-1}). The last dual block w_n is never stored.
struct PrimalDualPoint {
    Vec z;
    std::vector<Vec> w;

    std::size_t num_duals() const { return w.size(); }
    friend bool operator==(const PrimalDualPoint&, const PrimalDualPoint&) = default;
};

PrimalDualPoint operator-(const PrimalDualPoint& a, const PrimalDualPoint& b);
/// a + s * b
PrimalDualPoint axpy(const PrimalDualPoint& a, double s, const PrimalDualPoint& b);

/// Throws StructuralError unless p's blocks match `spaces` (z first).
void require_shape(const PrimalDualPoint& p, std::span<const Space> dual_spaces, Space primal);

/// w_n = -sum_i G_i^* w_i; the zero vector of H_0 when there are no duals.
Vec derived_wn(const PrimalDualPoint& p, std::span<const LinearMap> maps);

/// gamma <z1, z2> + sum_i <w1_i, w2_i>
double gamma_inner(const PrimalDualPoint& p, const PrimalDualPoint& q, double gamma);
double gamma_norm(const PrimalDualPoint& p, double gamma);

}  // namespace psplit
