#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dcop/model.hpp"

namespace dcop {

struct ScopeVar {
    VarIndex var = kNoVar;
    Value low = 0;
    Value high = 0;

    std::int64_t card() const noexcept {
        return static_cast<std::int64_t>(high) - static_cast<std::int64_t>(low) + 1;
    }
    bool operator==(const ScopeVar&) const = default;
};

// Utility table over a variable scope, mixed-radix indexed. Dense tables
// materialize every tuple including neginf ones; sparse tables store only the
// finite rows and read absent tuples as neginf. An empty scope is legal and
// indexes a single tuple, which is what a root's projected table is.
class UtilTable {
public:
    enum class Repr { Dense, Sparse };

    UtilTable() : UtilTable(std::vector<ScopeVar>{}, Repr::Sparse) {}
    UtilTable(std::vector<ScopeVar> scope, Repr repr);

    // Dense for complete tables (default 0), sparse for default-neginf tables
    // and for rules.
    static UtilTable from_constraint(const DcopInstance& inst, const Constraint& c);

    Repr repr() const noexcept { return repr_; }
    const std::vector<ScopeVar>& scope() const noexcept { return scope_; }
    std::uint64_t domain_product() const noexcept { return product_; }

    // Dense: the full tuple count. Sparse: stored finite rows.
    std::uint64_t row_count() const noexcept {
        return repr_ == Repr::Dense ? product_ : static_cast<std::uint64_t>(sparse_.size());
    }

    std::uint64_t index_of(std::span<const Value> tuple) const;
    void tuple_of(std::uint64_t index, std::span<Value> out) const;

    Utility lookup(std::span<const Value> tuple) const { return lookup_index(index_of(tuple)); }
    Utility lookup_index(std::uint64_t index) const {
        if (repr_ == Repr::Dense) return dense_[index];
        auto it = sparse_.find(index);
        return it == sparse_.end() ? Utility::neg_inf() : it->second;
    }

    void set(std::span<const Value> tuple, Utility u) { set_index(index_of(tuple), u); }
    void set_index(std::uint64_t index, Utility u);

    // Rows in index order; sparse tables visit only stored rows.
    void for_each_row(const std::function<void(std::uint64_t, Utility)>& fn) const;

    // Sorted (index, utility) pairs of the finite rows; representation-blind,
    // so a dense and a sparse table agree iff they denote the same function.
    std::vector<std::pair<std::uint64_t, std::int64_t>> finite_rows() const;

    bool same_function(const UtilTable& other) const {
        return scope_ == other.scope_ && finite_rows() == other.finite_rows();
    }

private:
    std::vector<ScopeVar> scope_;
    Repr repr_;
    std::uint64_t product_ = 1;
    std::vector<std::uint64_t> strides_;
    std::vector<Utility> dense_;
    std::unordered_map<std::uint64_t, Utility> sparse_;
};

// Natural join: sum the inputs over the union scope `on`, which must cover
// every input scope (ScopeMismatchError otherwise). The result is dense only
// when every input is dense.
UtilTable join_tables(std::span<const UtilTable* const> inputs, std::vector<ScopeVar> on);

}  // namespace dcop
