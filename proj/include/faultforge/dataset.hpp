#pragma once

#include <cmath>
#include <cstring>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "faultforge/errors.hpp"

namespace faultforge {

// Dense row-major matrix. A NaN cell marks a missing value.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool has_missing() const {
        for (double v : data_)
            if (std::isnan(v)) return true;
        return false;
    }

    Matrix gather_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const double* src = data_.data() + idx[i] * cols_;
            std::copy(src, src + cols_, out.data_.data() + i * cols_);
        }
        return out;
    }

    Matrix gather_cols(const std::vector<std::size_t>& idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t j = 0; j < idx.size(); ++j)
                out.at(r, j) = at(r, idx[j]);
        return out;
    }

    // Bitwise equality: missing (NaN) cells compare equal to missing cells.
    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ &&
               std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(double)) == 0;
    }

    static constexpr double missing() { return std::numeric_limits<double>::quiet_NaN(); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline bool is_missing(double v) { return std::isnan(v); }

// Ordered feature names; the default is the 20 CK-style metrics shipped with
// PROMISE defect exports.
struct FeatureSchema {
    std::vector<std::string> names;

    static FeatureSchema ck_default() {
        return {{"wmc",  "dit",  "noc", "cbo", "rfc", "lcom", "ca",  "ce",  "npm", "lcom3",
                 "loc",  "dam",  "moa", "mfa", "cam", "ic",   "cbm", "amc", "max_cc", "avg_cc"}};
    }

    std::size_t size() const { return names.size(); }

    void validate() const {
        if (names.empty()) throw SchemaError("feature schema is empty");
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i].empty()) throw SchemaError("feature schema contains an empty name");
            for (std::size_t j = i + 1; j < names.size(); ++j)
                if (names[i] == names[j])
                    throw SchemaError("duplicate feature name: " + names[i]);
        }
    }

    bool operator==(const FeatureSchema&) const = default;
};

// Row provenance: which project/version/class a row came from.
struct RowTag {
    std::string project;  // e.g. "ant-1.7"
    std::string version;
    std::string class_name;
};

// One parsed CSV record before binarization.
struct MetricRow {
    RowTag tag;
    std::vector<double> metrics;
    long bug_count = 0;
};

// Feature matrix with binary fault labels. Immutable by convention after
// construction; safe to share read-only across workers.
struct Dataset {
    FeatureSchema schema;
    Matrix X;
    std::vector<int> y;         // 1 = faulty, 0 = non-faulty
    std::vector<RowTag> tags;   // one per row

    std::size_t rows() const { return X.rows(); }

    void check() const {
        if (X.rows() != y.size() || X.rows() != tags.size())
            throw Error("dataset row count mismatch");
        if (X.cols() != schema.size())
            throw Error("dataset column count does not match schema");
        for (int label : y)
            if (label != 0 && label != 1) throw Error("labels must be 0 or 1");
    }
};

}  // namespace faultforge
