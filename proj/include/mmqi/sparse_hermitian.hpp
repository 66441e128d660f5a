#pragma once

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmqi/errors.hpp"

namespace mmqi {

using Complex = std::complex<double>;

/// Sparse complex Hermitian matrix, stored as the upper triangle plus
/// diagonal. The reconstructed dense matrix is Hermitian exactly by
/// construction: the lower triangle is defined as the conjugate of the
/// stored entries and diagonal values carry no imaginary part.
class SparseHermitian {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;  // row <= col
        Complex value;
    };

    class Builder {
    public:
        explicit Builder(std::size_t dim) : dim_(dim) {}

        void add(std::size_t row, std::size_t col, Complex value) {
            if (row > col || col >= dim_)
                throw InvalidArgs("SparseHermitian: entry outside upper triangle");
            triplets_.push_back({row, col, value});
        }

        SparseHermitian build() {
            std::sort(triplets_.begin(), triplets_.end(), [](const Entry& a, const Entry& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
            std::vector<Entry> merged;
            merged.reserve(triplets_.size());
            for (const Entry& t : triplets_) {
                if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
                    merged.back().value += t.value;
                } else {
                    merged.push_back(t);
                }
            }
            // Drop exact zeros; strip roundoff imaginary parts on the diagonal.
            std::vector<Entry> entries;
            entries.reserve(merged.size());
            for (Entry& e : merged) {
                if (e.row == e.col) e.value = Complex(e.value.real(), 0.0);
                if (e.value != Complex(0.0, 0.0)) entries.push_back(e);
            }
            return SparseHermitian(dim_, std::move(entries));
        }

    private:
        std::size_t dim_;
        std::vector<Entry> triplets_;
    };

    SparseHermitian() : dim_(0) {}

    std::size_t dim() const { return dim_; }
    const std::vector<Entry>& upper_entries() const { return entries_; }

    Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (const Entry& e : entries_) {
            m(e.row, e.col) += e.value;
            if (e.row != e.col) m(e.col, e.row) += std::conj(e.value);
        }
        return m;
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        if (static_cast<std::size_t>(v.size()) != dim_)
            throw DimMismatch("SparseHermitian::apply: vector length " +
                              std::to_string(v.size()) + " vs operator dim " +
                              std::to_string(dim_));
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
        for (const Entry& e : entries_) {
            out[e.row] += e.value * v[e.col];
            if (e.row != e.col) out[e.col] += std::conj(e.value) * v[e.row];
        }
        return out;
    }

    /// Left product op * m.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& m) const {
        if (static_cast<std::size_t>(m.rows()) != dim_)
            throw DimMismatch("SparseHermitian::apply: matrix rows vs operator dim");
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_, m.cols());
        for (const Entry& e : entries_) {
            out.row(e.row) += e.value * m.row(e.col);
            if (e.row != e.col) out.row(e.col) += std::conj(e.value) * m.row(e.row);
        }
        return out;
    }

    /// Tr[op * m] without materializing the product.
    Complex trace_product(const Eigen::MatrixXcd& m) const {
        if (static_cast<std::size_t>(m.rows()) != dim_ ||
            static_cast<std::size_t>(m.cols()) != dim_)
            throw DimMismatch("SparseHermitian::trace_product: dimension mismatch");
        Complex tr = 0.0;
        for (const Entry& e : entries_) {
            tr += e.value * m(e.col, e.row);
            if (e.row != e.col) tr += std::conj(e.value) * m(e.row, e.col);
        }
        return tr;
    }

    /// Scaling by a real factor preserves Hermiticity.
    SparseHermitian scaled(double factor) const {
        std::vector<Entry> entries = entries_;
        for (Entry& e : entries) e.value *= factor;
        return SparseHermitian(dim_, std::move(entries));
    }

    friend SparseHermitian operator+(const SparseHermitian& a, const SparseHermitian& b) {
        if (a.dim_ != b.dim_)
            throw DimMismatch("SparseHermitian: cannot add operators of different dimension");
        Builder builder(a.dim_);
        for (const Entry& e : a.entries_) builder.add(e.row, e.col, e.value);
        for (const Entry& e : b.entries_) builder.add(e.row, e.col, e.value);
        return builder.build();
    }

private:
    SparseHermitian(std::size_t dim, std::vector<Entry> entries)
        : dim_(dim), entries_(std::move(entries)) {}

    std::size_t dim_;
    std::vector<Entry> entries_;
};

}  // namespace mmqi
