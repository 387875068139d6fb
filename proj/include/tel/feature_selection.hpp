#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tel/matrix.hpp"

namespace tel {

/// One-way ANOVA F per column. A column with zero within-class variance but
/// differing class means scores +infinity; a column with no variance at all
/// scores 0. Throws SingleClass, LengthMismatch, TooFewRows (no within-class
/// degrees of freedom).
std::vector<double> anova_f_scores(const Matrix& x, std::span<const int> y);

/// Trains a model on x and returns one nonnegative importance per column.
using ImportanceFn = std::function<std::vector<double>(const Matrix& x, std::span<const int> y, std::uint64_t seed)>;

/// |w| of a logistic model (bias excluded).
std::vector<double> logistic_importance(const Matrix& x, std::span<const int> y, std::uint64_t seed);
/// Gini importance of a decision tree.
std::vector<double> tree_importance(const Matrix& x, std::span<const int> y, std::uint64_t seed);

/// Repeatedly trains on the surviving columns and drops the least important
/// one (ties: lexicographically smallest name) until keep remain. Returns the
/// surviving names in their original column order.
/// Throws KeepOutOfRange unless 1 <= keep <= columns.
std::vector<std::string> recursive_feature_elimination(const Matrix& x, std::span<const int> y,
                                                       const std::vector<std::string>& names, std::size_t keep,
                                                       const ImportanceFn& trainer, std::uint64_t seed);

}  // namespace tel
