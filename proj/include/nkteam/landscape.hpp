#pragma once

// NK performance landscapes: interdependence matrices for the six patterned
// structures, contribution tables, and exact evaluation of solutions.
//
// Indices are zero-based throughout: decision n in [0, N), subtask m in [0, M).
// A Solution packs decision n into bit n of an unsigned integer.

#include <algorithm>
#include <array>
#include <bit>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nkteam/error.hpp"
#include "nkteam/random.hpp"

namespace nkteam {

inline constexpr std::size_t kMaxDecisions = 20;

struct Solution {
    std::uint32_t code = 0;

    constexpr bool decision(std::size_t n) const noexcept { return (code >> n) & 1U; }
    constexpr Solution flipped(std::size_t n) const noexcept { return Solution{code ^ (1U << n)}; }
    constexpr auto operator<=>(const Solution&) const = default;
};

// Decisions of one subtask, packed the same way (bit 0 = first decision of the subtask).
struct SubSolution {
    std::uint32_t code = 0;

    constexpr auto operator<=>(const SubSolution&) const = default;
};

// Partition of N decisions into M contiguous subtasks of equal width S = N / M.
class Partition {
public:
    Partition(std::size_t decisions, std::size_t subtasks) : decisions_(decisions), subtasks_(subtasks) {
        if (subtasks == 0 || decisions == 0 || decisions % subtasks != 0)
            throw ConfigError("subtask count M must be positive and divide the decision count N");
        if (decisions > kMaxDecisions)
            throw ConfigError("decision count N exceeds " + std::to_string(kMaxDecisions));
        width_ = decisions / subtasks;
        mask_ = (1U << width_) - 1U;
    }

    std::size_t decisions() const noexcept { return decisions_; }
    std::size_t subtasks() const noexcept { return subtasks_; }
    std::size_t width() const noexcept { return width_; }
    std::uint32_t sub_solutions() const noexcept { return 1U << width_; }
    std::size_t first(std::size_t m) const noexcept { return m * width_; }

    SubSolution extract(Solution s, std::size_t m) const noexcept {
        return SubSolution{(s.code >> first(m)) & mask_};
    }
    Solution replace(Solution s, std::size_t m, SubSolution sub) const noexcept {
        const auto shift = first(m);
        return Solution{(s.code & ~(mask_ << shift)) | ((sub.code & mask_) << shift)};
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::size_t decisions_;
    std::size_t subtasks_;
    std::size_t width_ = 0;
    std::uint32_t mask_ = 0;
};

enum class Structure { block, centralized, dependent, hierarchical, local, random };

inline constexpr std::array<Structure, 6> kAllStructures = {
    Structure::block, Structure::centralized, Structure::dependent,
    Structure::hierarchical, Structure::local, Structure::random};

inline std::string_view to_string(Structure s) {
    switch (s) {
        case Structure::block: return "block";
        case Structure::centralized: return "centralized";
        case Structure::dependent: return "dependent";
        case Structure::hierarchical: return "hierarchical";
        case Structure::local: return "local";
        case Structure::random: return "random";
    }
    return "?";
}

inline std::optional<Structure> parse_structure(std::string_view text) {
    for (auto s : kAllStructures)
        if (to_string(s) == text) return s;
    return std::nullopt;
}

// rows[n] lists, in ascending order, the decisions feeding contribution n.
struct InterdependenceMatrix {
    std::size_t n_decisions = 0;
    std::size_t k = 0;
    Structure structure = Structure::block;
    std::vector<std::vector<std::size_t>> rows;

    bool depends(std::size_t contribution, std::size_t decision) const {
        const auto& r = rows.at(contribution);
        return std::binary_search(r.begin(), r.end(), decision);
    }

    // N lines of N characters: 'X' where contribution (row) depends on decision (column).
    std::string to_grid() const {
        std::string out;
        out.reserve(n_decisions * (n_decisions + 1));
        for (std::size_t r = 0; r < n_decisions; ++r) {
            for (std::size_t c = 0; c < n_decisions; ++c) out += depends(r, c) ? 'X' : '.';
            out += '\n';
        }
        return out;
    }
};

namespace detail {

inline void check_matrix(const InterdependenceMatrix& m) {
    if (m.rows.size() != m.n_decisions) throw ConfigError("matrix must have exactly N rows");
    for (std::size_t n = 0; n < m.rows.size(); ++n) {
        const auto& r = m.rows[n];
        if (r.empty() || r.size() > m.n_decisions) throw ConfigError("matrix row size out of range");
        if (!std::is_sorted(r.begin(), r.end()) || std::adjacent_find(r.begin(), r.end()) != r.end())
            throw ConfigError("matrix row indices must be distinct and sorted");
        if (r.back() >= m.n_decisions) throw ConfigError("matrix row index out of range");
        if (!std::binary_search(r.begin(), r.end(), n))
            throw ConfigError("matrix row " + std::to_string(n) + " is missing its diagonal entry");
    }
}

inline std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace detail

// Wraps user-supplied dependency rows (e.g. a transcribed figure) after validation.
inline InterdependenceMatrix make_matrix(Structure tag, std::size_t k, std::vector<std::vector<std::size_t>> rows) {
    InterdependenceMatrix m;
    m.n_decisions = rows.size();
    m.k = k;
    m.structure = tag;
    m.rows = std::move(rows);
    for (auto& r : m.rows) std::sort(r.begin(), r.end());
    detail::check_matrix(m);
    return m;
}

inline InterdependenceMatrix build_matrix(Structure structure, std::size_t n, std::size_t k, Rng& rng) {
    if (n == 0 || n > kMaxDecisions) throw ConfigError("decision count N must be in [1, " + std::to_string(kMaxDecisions) + "]");
    if (k > n - 1) throw ConfigError("K must satisfy 0 <= K <= N-1");
    if (structure == Structure::block && n % (k + 1) != 0)
        throw ConfigError("block structure requires K+1 to divide N");

    InterdependenceMatrix m;
    m.n_decisions = n;
    m.k = k;
    m.structure = structure;
    m.rows.resize(n);

    switch (structure) {
        case Structure::block:
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t start = (i / (k + 1)) * (k + 1);
                for (std::size_t j = start; j < start + k + 1; ++j) m.rows[i].push_back(j);
            }
            break;
        case Structure::centralized:
            for (std::size_t i = 0; i < n; ++i) {
                if (i <= k) {
                    for (std::size_t j = 0; j <= k; ++j) m.rows[i].push_back(j);
                } else {
                    for (std::size_t j = 0; j < k; ++j) m.rows[i].push_back(j);
                    m.rows[i].push_back(i);
                }
            }
            break;
        case Structure::dependent: {
            Rng unused(0);
            const auto central = build_matrix(Structure::centralized, n, k, unused);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j : central.rows[i]) m.rows[j].push_back(i);
            for (auto& r : m.rows) r = detail::sorted(std::move(r));
            break;
        }
        case Structure::hierarchical:
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t back = std::min(k, i);
                for (std::size_t j = i - back; j <= i; ++j) m.rows[i].push_back(j);
            }
            break;
        case Structure::local:
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t d = 0; d <= k; ++d) m.rows[i].push_back((i + n - d) % n);
                m.rows[i] = detail::sorted(std::move(m.rows[i]));
            }
            break;
        case Structure::random:
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<std::size_t> pool;
                pool.reserve(n - 1);
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) pool.push_back(j);
                // Partial Fisher-Yates: first k slots become a uniform k-subset.
                for (std::size_t s = 0; s < k; ++s) {
                    const auto pick = s + rng.index(pool.size() - s);
                    std::swap(pool[s], pool[pick]);
                }
                pool.resize(k);
                pool.push_back(i);
                m.rows[i] = detail::sorted(std::move(pool));
            }
            break;
    }
    detail::check_matrix(m);
    return m;
}

struct Landscape {
    InterdependenceMatrix matrix;
    std::vector<std::vector<double>> tables;  // tables[n][joint setting of rows[n]]
    Solution global_argmax;
    double global_max = 0.0;

    std::size_t decisions() const noexcept { return matrix.n_decisions; }
};

// Position j of rows[n] contributes bit j of the table index.
inline std::uint32_t table_index(const InterdependenceMatrix& m, std::size_t n, Solution s) {
    std::uint32_t idx = 0;
    const auto& r = m.rows[n];
    for (std::size_t j = 0; j < r.size(); ++j) idx |= static_cast<std::uint32_t>(s.decision(r[j])) << j;
    return idx;
}

inline double contribution(const Landscape& l, Solution s, std::size_t n) {
    if (n >= l.decisions()) throw UsageError("decision index " + std::to_string(n) + " out of range");
    return l.tables[n][table_index(l.matrix, n, s)];
}

inline double evaluate(const Landscape& l, Solution s) {
    double sum = 0.0;
    for (std::size_t n = 0; n < l.decisions(); ++n) sum += l.tables[n][table_index(l.matrix, n, s)];
    return sum / static_cast<double>(l.decisions());
}

inline double subtask_performance(const Landscape& l, const Partition& p, Solution s, std::size_t m) {
    if (m >= p.subtasks()) throw UsageError("subtask index " + std::to_string(m) + " out of range");
    double sum = 0.0;
    for (std::size_t n = p.first(m); n < p.first(m) + p.width(); ++n) sum += contribution(l, s, n);
    return sum / static_cast<double>(p.width());
}

namespace detail {

// Visits every solution in Gray-code order, updating each contribution's table
// index incrementally. fn(code, contrib) sees contrib[n] for n in decision order.
template <class Fn>
void gray_scan(const Landscape& l, Fn&& fn) {
    const std::size_t n = l.decisions();
    const std::uint32_t count = 1U << n;
    std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> touched(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto& r = l.matrix.rows[c];
        for (std::size_t j = 0; j < r.size(); ++j) touched[r[j]].emplace_back(c, 1U << j);
    }
    std::vector<std::uint32_t> index(n, 0);
    std::vector<double> contrib(n);
    std::uint32_t code = 0;
    for (std::uint32_t g = 0; g < count; ++g) {
        if (g != 0) {
            const auto b = static_cast<std::size_t>(std::countr_zero(g));
            code ^= 1U << b;
            for (auto [c, bit] : touched[b]) index[c] ^= bit;
        }
        for (std::size_t c = 0; c < n; ++c) contrib[c] = l.tables[c][index[c]];
        fn(code, contrib.data());
    }
}

}  // namespace detail

// Exhaustive argmax; ties go to the lowest encoding.
inline std::pair<Solution, double> global_optimum(const Landscape& l) {
    const std::size_t n = l.decisions();
    Solution best{0};
    double best_value = -1.0;
    detail::gray_scan(l, [&](std::uint32_t code, const double* contrib) {
        double sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) sum += contrib[c];
        const double v = sum / static_cast<double>(n);
        if (v > best_value || (v == best_value && code < best.code)) {
            best_value = v;
            best = Solution{code};
        }
    });
    return {best, best_value};
}

// Contribution values are i.i.d. U(0,1); tables are filled in row order.
inline Landscape generate_landscape(InterdependenceMatrix matrix, Rng& rng) {
    detail::check_matrix(matrix);
    Landscape l;
    l.tables.resize(matrix.n_decisions);
    for (std::size_t n = 0; n < matrix.n_decisions; ++n) {
        auto& t = l.tables[n];
        t.resize(std::size_t{1} << matrix.rows[n].size());
        for (auto& v : t) v = rng.uniform();
    }
    l.matrix = std::move(matrix);
    std::tie(l.global_argmax, l.global_max) = global_optimum(l);
    return l;
}

// Number of solutions with no strictly better 1-bit-flip neighbour.
inline std::size_t count_local_optima(const Landscape& l) {
    const std::uint32_t count = 1U << l.decisions();
    std::vector<double> values(count);
    for (std::uint32_t c = 0; c < count; ++c) values[c] = evaluate(l, Solution{c});
    std::size_t optima = 0;
    for (std::uint32_t c = 0; c < count; ++c) {
        bool peak = true;
        for (std::size_t n = 0; n < l.decisions() && peak; ++n)
            if (values[c ^ (1U << n)] > values[c]) peak = false;
        optima += peak;
    }
    return optima;
}

// Anything that can report subtask performance C(d_m) for full solutions.
template <class E>
concept SubtaskEvaluator = requires(const E& e, Solution s, std::size_t m) {
    { e.subtask_performance(s, m) } -> std::convertible_to<double>;
    { e.partition() } -> std::convertible_to<const Partition&>;
};

// Evaluates directly from the contribution tables.
class DirectEvaluator {
public:
    DirectEvaluator(const Landscape& landscape, Partition partition)
        : landscape_(&landscape), partition_(partition) {
        if (partition.decisions() != landscape.decisions()) throw ConfigError("partition does not match landscape size");
    }
    double subtask_performance(Solution s, std::size_t m) const {
        return nkteam::subtask_performance(*landscape_, partition_, s, m);
    }
    double performance(Solution s) const { return evaluate(*landscape_, s); }
    const Partition& partition() const noexcept { return partition_; }

private:
    const Landscape* landscape_;
    Partition partition_;
};

// Precomputed C(d) and every C(d_m) for all 2^N solutions, filled by a Gray-code
// walk so each step only re-indexes the contributions touched by one flip.
// Values are bitwise identical to evaluate() / subtask_performance().
class PerformanceTable {
public:
    PerformanceTable(const Landscape& l, Partition partition)
        : partition_(partition), stride_(partition.subtasks() + 1) {
        const std::size_t n = l.decisions();
        if (partition.decisions() != n) throw ConfigError("partition does not match landscape size");
        const std::uint32_t count = 1U << n;
        values_.assign(std::size_t{count} * stride_, 0.0);

        detail::gray_scan(l, [&](std::uint32_t code, const double* contrib) {
            double* row = &values_[std::size_t{code} * stride_];
            double total = 0.0;
            for (std::size_t c = 0; c < n; ++c) total += contrib[c];
            row[0] = total / static_cast<double>(n);
            for (std::size_t m = 0; m < partition_.subtasks(); ++m) {
                double sum = 0.0;
                for (std::size_t c = partition_.first(m); c < partition_.first(m) + partition_.width(); ++c)
                    sum += contrib[c];
                row[m + 1] = sum / static_cast<double>(partition_.width());
            }
        });
        best_ = Solution{0};
        for (std::uint32_t c = 1; c < count; ++c)
            if (performance(Solution{c}) > performance(best_)) best_ = Solution{c};
    }

    double performance(Solution s) const noexcept { return values_[std::size_t{s.code} * stride_]; }
    double subtask_performance(Solution s, std::size_t m) const noexcept {
        return values_[std::size_t{s.code} * stride_ + m + 1];
    }
    const Partition& partition() const noexcept { return partition_; }
    Solution best() const noexcept { return best_; }
    double best_value() const noexcept { return performance(best_); }

private:
    Partition partition_;
    std::size_t stride_;
    std::vector<double> values_;
    Solution best_;
};

}  // namespace nkteam
