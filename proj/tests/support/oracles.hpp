#pragma once

// Brute-force reference implementations, written straight from the
// definitions and shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "tel/logistic.hpp"
#include "tel/matrix.hpp"
#include "tel/mining.hpp"

namespace tel::oracle {

// Counts every non-empty subset of the item universe directly.
inline FrequentItemsets exhaustive_itemsets(const TransactionDB& db, double min_support) {
    std::set<Item> universe;
    for (const auto& t : db.transactions) universe.insert(t.begin(), t.end());
    const std::vector<Item> items(universe.begin(), universe.end());
    const double threshold = min_support * static_cast<double>(db.size());
    FrequentItemsets out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << items.size()); ++mask) {
        Itemset s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if ((mask >> i) & 1) s.push_back(items[i]);
        }
        std::size_t count = 0;
        for (const auto& t : db.transactions) {
            bool all = true;
            for (const auto& i : s) all = all && t.contains(i);
            count += all;
        }
        // count >= min_support * |db|, with the same rounding slack as the library.
        if (count > 0 && static_cast<double>(count) >= threshold - 1e-9) out[s] = count;
    }
    return out;
}

// Textbook LOF, O(n^2), ties at the k-distance included.
inline std::vector<double> lof(const Matrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    auto d = [&](std::size_t a, std::size_t b) {
        double s = 0;
        for (std::size_t c = 0; c < x.cols(); ++c) s += (x(a, c) - x(b, c)) * (x(a, c) - x(b, c));
        return std::sqrt(s);
    };
    std::vector<double> kdist(n);
    std::vector<std::vector<std::size_t>> nk(n);
    for (std::size_t p = 0; p < n; ++p) {
        std::vector<double> ds;
        for (std::size_t q = 0; q < n; ++q) {
            if (q != p) ds.push_back(d(p, q));
        }
        std::nth_element(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(k - 1), ds.end());
        kdist[p] = ds[k - 1];
        for (std::size_t q = 0; q < n; ++q) {
            if (q != p && d(p, q) <= kdist[p]) nk[p].push_back(q);
        }
    }
    std::vector<double> lrd(n);
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0;
        for (std::size_t o : nk[p]) s += std::max(kdist[o], d(p, o));
        lrd[p] = 1.0 / std::max(s / static_cast<double>(nk[p].size()), 1e-12);
    }
    std::vector<double> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0;
        for (std::size_t o : nk[p]) s += lrd[o] / lrd[p];
        out[p] = s / static_cast<double>(nk[p].size());
    }
    return out;
}

// Largest relative error between the analytic gradient and central differences.
inline double gradient_check(std::span<const double> w, const Matrix& x, std::span<const int> y, double l2,
                             double h = 1e-5) {
    const auto g = logistic_gradient(w, x, y, l2);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        std::vector<double> plus(w.begin(), w.end()), minus(w.begin(), w.end());
        plus[i] += h;
        minus[i] -= h;
        const double numeric = (logistic_loss(plus, x, y, l2) - logistic_loss(minus, x, y, l2)) / (2 * h);
        const double rel = std::abs(numeric - g[i]) / std::max(1e-8, std::max(std::abs(numeric), std::abs(g[i])));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace tel::oracle
