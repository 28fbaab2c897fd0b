#ifndef PBINFER_DATASET_HPP
#define PBINFER_DATASET_HPP

#include <cstdint>
#include <vector>

#include "pbinfer/numerics.hpp"

namespace pbinfer {

enum class Family { mean, linear, logistic };

const char* family_name(Family f);
Family family_from_name(const std::string& s);

// Rows of (y, yhat, x). y is present on labeled rows only; unlabeled slots
// hold NaN and are never read (y_at asserts). The design matrix carries the
// intercept in column 0. Immutable after construction.
struct Dataset {
    std::size_t n = 0;
    Mat x;                         // n x dim, first column all ones
    Vec yhat;                      // n
    Vec y;                         // n, NaN on unlabeled rows
    std::vector<std::uint8_t> labeled;
    std::vector<std::uint32_t> labeled_idx;
    std::vector<std::uint32_t> unlabeled_idx;

    std::size_t n_lab() const { return labeled_idx.size(); }
    std::size_t n_unlab() const { return unlabeled_idx.size(); }
    std::size_t dim() const { return x.cols; }
    double pi_hat() const { return static_cast<double>(n_lab()) / static_cast<double>(n); }

    double y_at(std::size_t i) const;
};

/// Builds a dataset from a design matrix (intercept included), predictions,
/// and an outcome vector with NaN marking unlabeled rows. Validates
/// finiteness, the intercept column, and n_lab >= dim + 1; for the logistic
/// family every present outcome must be 0 or 1.
Dataset make_dataset(Mat x, Vec yhat, Vec y_with_nan, Family family);

/// Convenience for the mean family: design matrix is a single ones column.
Dataset make_mean_dataset(Vec yhat, Vec y_with_nan);

} // namespace pbinfer

#endif
