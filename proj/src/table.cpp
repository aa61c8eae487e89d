#include "dcop/table.hpp"

#include <algorithm>

namespace dcop {

namespace {

// Dense payloads beyond this row count would not fit the benchmark machines;
// the sparse and rules strategies exist precisely to stay below it. Sparse
// tables only need the index space to stay addressable, so they get a far
// looser cap that still keeps stride arithmetic away from u64 overflow.
constexpr std::uint64_t kMaxDenseRows = std::uint64_t(1) << 26;
constexpr std::uint64_t kMaxIndexSpace = std::uint64_t(1) << 40;

}  // namespace

UtilTable::UtilTable(std::vector<ScopeVar> scope, Repr repr) : scope_(std::move(scope)), repr_(repr) {
    strides_.resize(scope_.size());
    product_ = 1;
    for (std::size_t i = scope_.size(); i-- > 0;) {
        const ScopeVar& sv = scope_[i];
        if (sv.low > sv.high) throw ScopeMismatchError("table scope variable with empty domain");
        strides_[i] = product_;
        std::uint64_t card = static_cast<std::uint64_t>(sv.card());
        if (product_ > kMaxIndexSpace / card)
            throw InstanceTooLargeError("table scope product overflows the index cap");
        product_ *= card;
    }
    if (repr_ == Repr::Dense) {
        if (product_ > kMaxDenseRows) throw InstanceTooLargeError("dense table exceeds the row cap");
        dense_.assign(product_, Utility::neg_inf());
    }
}

UtilTable UtilTable::from_constraint(const DcopInstance& inst, const Constraint& c) {
    std::vector<ScopeVar> scope;
    for (VarIndex v : c.scope) {
        const Variable& var = inst.variable(v);
        scope.push_back(ScopeVar{v, var.low, var.high});
    }

    if (c.is_table() && !c.table().default_neg_inf) {
        UtilTable out(std::move(scope), Repr::Dense);
        std::vector<Value> tuple(c.scope.size());
        for (std::uint64_t idx = 0; idx < out.product_; ++idx) {
            out.tuple_of(idx, tuple);
            out.set_index(idx, c.evaluate(tuple));
        }
        return out;
    }

    UtilTable out(std::move(scope), Repr::Sparse);
    std::vector<Value> tuple(c.scope.size());
    for (std::uint64_t idx = 0; idx < out.product_; ++idx) {
        out.tuple_of(idx, tuple);
        Utility u = c.evaluate(tuple);
        if (u.is_finite()) out.set_index(idx, u);
    }
    return out;
}

std::uint64_t UtilTable::index_of(std::span<const Value> tuple) const {
    if (tuple.size() != scope_.size()) throw ScopeMismatchError("tuple arity does not match the table scope");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        const ScopeVar& sv = scope_[i];
        if (tuple[i] < sv.low || tuple[i] > sv.high)
            throw OutOfDomainError("tuple value outside the table scope domain");
        idx += strides_[i] * static_cast<std::uint64_t>(tuple[i] - sv.low);
    }
    return idx;
}

void UtilTable::tuple_of(std::uint64_t index, std::span<Value> out) const {
    if (out.size() != scope_.size()) throw ScopeMismatchError("tuple buffer arity mismatch");
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        std::uint64_t card = static_cast<std::uint64_t>(scope_[i].card());
        out[i] = static_cast<Value>(scope_[i].low + static_cast<Value>((index / strides_[i]) % card));
    }
}

void UtilTable::set_index(std::uint64_t index, Utility u) {
    if (index >= product_) throw OutOfDomainError("row index out of range");
    if (repr_ == Repr::Dense) {
        dense_[index] = u;
        return;
    }
    if (!u.is_finite()) {
        sparse_.erase(index);  // sparse tables never store the default
        return;
    }
    sparse_[index] = u;
}

void UtilTable::for_each_row(const std::function<void(std::uint64_t, Utility)>& fn) const {
    if (repr_ == Repr::Dense) {
        for (std::uint64_t i = 0; i < product_; ++i) fn(i, dense_[i]);
        return;
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(sparse_.size());
    for (const auto& [k, _] : sparse_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (std::uint64_t k : keys) fn(k, sparse_.at(k));
}

std::vector<std::pair<std::uint64_t, std::int64_t>> UtilTable::finite_rows() const {
    std::vector<std::pair<std::uint64_t, std::int64_t>> out;
    for_each_row([&](std::uint64_t idx, Utility u) {
        if (u.is_finite()) out.emplace_back(idx, u.value());
    });
    return out;
}

UtilTable join_tables(std::span<const UtilTable* const> inputs, std::vector<ScopeVar> on) {
    bool dense = true;
    for (const UtilTable* t : inputs) {
        if (t->repr() == UtilTable::Repr::Sparse) dense = false;
        for (const ScopeVar& sv : t->scope())
            if (std::find(on.begin(), on.end(), sv) == on.end())
                throw ScopeMismatchError("join scope does not cover an input scope");
    }

    UtilTable out(std::move(on), dense ? UtilTable::Repr::Dense : UtilTable::Repr::Sparse);
    const auto& scope = out.scope();

    // Gather positions of each input scope inside the join scope.
    std::vector<std::vector<std::size_t>> positions(inputs.size());
    for (std::size_t t = 0; t < inputs.size(); ++t)
        for (const ScopeVar& sv : inputs[t]->scope()) {
            auto it = std::find(scope.begin(), scope.end(), sv);
            positions[t].push_back(static_cast<std::size_t>(it - scope.begin()));
        }

    std::vector<Value> tuple(scope.size());
    std::vector<Value> sub;
    for (std::uint64_t idx = 0; idx < out.domain_product(); ++idx) {
        out.tuple_of(idx, tuple);
        Utility sum = Utility::finite(0);
        for (std::size_t t = 0; t < inputs.size() && sum.is_finite(); ++t) {
            sub.resize(positions[t].size());
            for (std::size_t i = 0; i < positions[t].size(); ++i) sub[i] = tuple[positions[t][i]];
            sum += inputs[t]->lookup(sub);
        }
        if (sum.is_finite() || out.repr() == UtilTable::Repr::Dense) out.set_index(idx, sum);
    }
    return out;
}

}  // namespace dcop
