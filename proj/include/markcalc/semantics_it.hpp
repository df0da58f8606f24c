#pragma once

#include "markcalc/mlts.hpp"
#include "markcalc/term.hpp"
#include "markcalc/wellformed.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace markcalc {

/// Rate of a synchronization between two timed actions. Must be
/// associative and commutative.
struct RateComposer {
    std::string name;
    std::function<Rate(const Rate&, const Rate&)> compose;

    static RateComposer product() { return {"product", [](const Rate& a, const Rate& b) { return a * b; }}; }
    static RateComposer min() {
        return {"min", [](const Rate& a, const Rate& b) { return std::min(a, b); }};
    }
    static RateComposer sum() { return {"sum", [](const Rate& a, const Rate& b) { return a + b; }}; }

    /// "product", "min" or "sum"; throws std::invalid_argument otherwise.
    static RateComposer by_name(const std::string& n) {
        if (n == "product") return product();
        if (n == "min") return min();
        if (n == "sum") return sum();
        throw std::invalid_argument("unknown rate composer '" + n + "'");
    }
};

class UnguardedRecursion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One IT transition with its proof multiplicity.
struct ItMove {
    ActionName name;
    Rate rate;
    ItTerm target;
    std::uint64_t mult = 1;
};

namespace detail {

using ItKey = std::tuple<ActionName, Rate, std::size_t>;

// Aggregates moves by (name, rate, target); targets compared syntactically.
class ItMoveSet {
public:
    void add(ActionName a, Rate r, ItTerm t, std::uint64_t m) {
        for (auto& mv : moves_)
            if (mv.name == a && mv.rate == r && mv.target == t) {
                mv.mult += m;
                return;
            }
        moves_.push_back({std::move(a), r, std::move(t), m});
    }
    std::vector<ItMove> take() { return std::move(moves_); }

private:
    std::vector<ItMove> moves_;
};

inline std::size_t rec_count(const ItTerm& t) {
    std::size_t n = 0;
    for_each_subterm(t, [&](const ItTerm& s) { n += s.kind() == Kind::Rec; });
    return n;
}

inline std::vector<ItMove> step_it(const ItTerm& t, const RateComposer& otimes, std::size_t unfold_budget) {
    ItMoveSet out;
    switch (t.kind()) {
    case Kind::Nil:
        break;
    case Kind::Prefix:
        out.add(t.name(), t.rate(), t.body(), 1);
        break;
    case Kind::Choice:
        for (auto& m : step_it(t.left(), otimes, unfold_budget))
            out.add(std::move(m.name), m.rate, std::move(m.target), m.mult);
        for (auto& m : step_it(t.right(), otimes, unfold_budget))
            out.add(std::move(m.name), m.rate, std::move(m.target), m.mult);
        break;
    case Kind::Par: {
        const auto& sync = t.names();
        auto lhs = step_it(t.left(), otimes, unfold_budget);
        auto rhs = step_it(t.right(), otimes, unfold_budget);
        for (const auto& m : lhs)
            if (!contains(sync, m.name))
                out.add(m.name, m.rate, ItTerm::par(m.target, t.right(), sync), m.mult);
        for (const auto& m : rhs)
            if (!contains(sync, m.name))
                out.add(m.name, m.rate, ItTerm::par(t.left(), m.target, sync), m.mult);
        for (const auto& l : lhs) {
            if (!contains(sync, l.name))
                continue;
            for (const auto& r : rhs)
                if (r.name == l.name)
                    out.add(l.name, otimes.compose(l.rate, r.rate), ItTerm::par(l.target, r.target, sync),
                            l.mult * r.mult);
        }
        break;
    }
    case Kind::Hide:
        for (auto& m : step_it(t.body(), otimes, unfold_budget)) {
            ActionName a = contains(t.names(), m.name) ? ActionName::tau() : m.name;
            out.add(std::move(a), m.rate, ItTerm::hide(m.target, t.names()), m.mult);
        }
        break;
    case Kind::Relab:
        for (auto& m : step_it(t.body(), otimes, unfold_budget))
            out.add(t.relabeling().apply(m.name), m.rate, ItTerm::relabel(m.target, t.relabeling()), m.mult);
        break;
    case Kind::Rec:
        if (unfold_budget == 0)
            throw UnguardedRecursion("recursion does not reach a prefix: rec " + t.var_name());
        return step_it(unfold(t), otimes, unfold_budget - 1);
    case Kind::Var:
        throw std::invalid_argument("cannot step an open term: free variable " + t.var_name());
    default:
        throw std::invalid_argument("not an ITMPC operator");
    }
    return out.take();
}

} // namespace detail

/// All transitions of t derivable by the ITMPC rules, one entry per
/// distinct (name, rate, target) with the number of derivation proofs.
///
/// Synchronizing actions compose their rates with `otimes`; hidden names
/// become tau and relabelled names are renamed, after which now-identical
/// triples add their multiplicities.
inline std::vector<ItMove> step_it(const ItTerm& t, const RateComposer& otimes = RateComposer::product()) {
    return detail::step_it(t, otimes, detail::rec_count(t) + 1);
}

/// Successor function in the shape expected by build().
inline auto it_stepper(RateComposer otimes = RateComposer::product()) {
    return [otimes = std::move(otimes)](const ItTerm& t) {
        std::vector<Step<ItTerm>> out;
        for (auto& m : step_it(t, otimes))
            out.push_back({Label::it_act(std::move(m.name), m.rate), std::move(m.target), m.mult});
        return out;
    };
}

inline Mlts<ItTerm> build_it(const ItTerm& t, const RateComposer& otimes = RateComposer::product(),
                             std::size_t max_states = kDefaultMaxStates) {
    return build(CalculusTag::It, t, it_stepper(otimes), max_states);
}

/// Sum of rate * multiplicity over a-moves of t whose target satisfies `in_dest`.
template <class Pred>
Rate rate_it(const ItTerm& t, const ActionName& a, Pred&& in_dest, const RateComposer& otimes = RateComposer::product()) {
    Rate total;
    for (const auto& m : step_it(t, otimes))
        if (m.name == a && in_dest(m.target))
            total += scale(m.rate, m.mult);
    return total;
}

/// Reciprocal of the mean sojourn time of t; zero for a term with no moves.
inline Rate total_rate_it(const ItTerm& t, const RateComposer& otimes = RateComposer::product()) {
    Rate total;
    for (const auto& m : step_it(t, otimes))
        total += scale(m.rate, m.mult);
    return total;
}

} // namespace markcalc
