#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "promptfront/errors.hpp"
#include "promptfront/rng.hpp"

// Generic multi-objective primitives (minimization). Nothing here knows about
// prompts or models; the engine and the aggregation layer both build on it.
namespace promptfront::nsga2 {

using Objectives = std::vector<double>;

// a dominates b iff a <= b everywhere and a < b somewhere.
inline bool dominates(const Objectives& a, const Objectives& b) {
    if (a.size() != b.size()) throw ValidationError("objective vectors differ in length");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

// Deb's fast non-dominated sort. Fronts hold indices into `objs`, ascending
// within each front.
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(const std::vector<Objectives>& objs) {
    const std::size_t n = objs.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;

    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(objs[i], objs[j])) {
                dominated[i].push_back(j);
            } else if (dominates(objs[j], objs[i])) {
                ++domination_count[i];
            }
        }
        if (domination_count[i] == 0) current.push_back(i);
    }

    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated[i]) {
                if (--domination_count[j] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

inline std::vector<int> ranks_from_fronts(const std::vector<std::vector<std::size_t>>& fronts, std::size_t n) {
    std::vector<int> rank(n, -1);
    for (std::size_t f = 0; f < fronts.size(); ++f)
        for (std::size_t i : fronts[f]) rank[i] = static_cast<int>(f);
    return rank;
}

// Crowding distance of one front. Fronts of one or two members are all
// boundary. For larger fronts, members holding an objective's extreme value
// get infinity; interior members accumulate the span between the nearest
// distinct values on either side, normalized by the objective range. Working
// on distinct values (rather than sort positions) keeps duplicated objective
// vectors at equal, finite crowding. A constant objective contributes zero.
inline std::vector<double> crowding_distance(const std::vector<Objectives>& front) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (n <= 2) return std::vector<double>(n, inf);

    std::vector<double> crowding(n, 0.0);
    const std::size_t n_obj = front[0].size();
    std::vector<double> values(n);
    for (std::size_t m = 0; m < n_obj; ++m) {
        for (std::size_t i = 0; i < n; ++i) values[i] = front[i][m];
        std::vector<double> distinct = values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        const double lo = distinct.front();
        const double hi = distinct.back();
        if (lo == hi) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (values[i] == lo || values[i] == hi) {
                crowding[i] = inf;
                continue;
            }
            auto at = std::lower_bound(distinct.begin(), distinct.end(), values[i]);
            crowding[i] += (*(at + 1) - *(at - 1)) / (hi - lo);
        }
    }
    return crowding;
}

// Lower rank wins; ties go to larger crowding, then to the lower index.
inline bool beats(std::size_t i, std::size_t j, const std::vector<int>& rank, const std::vector<double>& crowding) {
    if (rank[i] != rank[j]) return rank[i] < rank[j];
    if (crowding[i] != crowding[j]) return crowding[i] > crowding[j];
    return i < j;
}

// Binary tournament over two uniform draws (self-pairing allowed).
inline std::size_t tournament_select(const std::vector<int>& rank, const std::vector<double>& crowding, Rng& rng) {
    const std::size_t i = rng.index(rank.size());
    const std::size_t j = rng.index(rank.size());
    return beats(i, j, rank, crowding) ? i : j;
}

// Environmental selection: whole fronts in rank order; the last front is
// truncated by descending crowding, ties broken by the lower index.
inline std::vector<std::size_t> environmental_select(const std::vector<Objectives>& objs, std::size_t target_size) {
    const auto fronts = fast_nondominated_sort(objs);
    std::vector<std::size_t> selected;
    selected.reserve(target_size);
    for (const auto& front : fronts) {
        if (selected.size() + front.size() <= target_size) {
            selected.insert(selected.end(), front.begin(), front.end());
            if (selected.size() == target_size) break;
            continue;
        }
        std::vector<Objectives> front_objs;
        front_objs.reserve(front.size());
        for (std::size_t i : front) front_objs.push_back(objs[i]);
        const std::vector<double> crowding = crowding_distance(front_objs);

        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (crowding[a] != crowding[b]) return crowding[a] > crowding[b];
            return front[a] < front[b];
        });
        for (std::size_t k = 0; selected.size() < target_size; ++k) selected.push_back(front[order[k]]);
        break;
    }
    return selected;
}

inline std::vector<std::size_t> nondominated_indices(const std::vector<Objectives>& objs) {
    if (objs.empty()) return {};
    return fast_nondominated_sort(objs).front();
}

} // namespace promptfront::nsga2
