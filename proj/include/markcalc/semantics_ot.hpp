#pragma once

#include "markcalc/mlts.hpp"
#include "markcalc/semantics_it.hpp"
#include "markcalc/term.hpp"
#include "markcalc/wellformed.hpp"

#include <stdexcept>
#include <vector>

namespace markcalc {

struct OtActionMove {
    ActionName name;
    OtTerm target;
    friend bool operator==(const OtActionMove&, const OtActionMove&) = default;
};

struct OtTimeMove {
    Rate rate;
    OtTerm target;
    std::uint64_t mult = 1;
};

namespace detail {

inline std::size_t rec_count(const OtTerm& t) {
    std::size_t n = 0;
    for_each_subterm(t, [&](const OtTerm& s) { n += s.kind() == Kind::Rec; });
    return n;
}

inline void add_action(std::vector<OtActionMove>& out, ActionName a, OtTerm t) {
    for (const auto& m : out)
        if (m.name == a && m.target == t)
            return;
    out.push_back({std::move(a), std::move(t)});
}

inline void add_time(std::vector<OtTimeMove>& out, Rate r, OtTerm t, std::uint64_t mult) {
    for (auto& m : out)
        if (m.rate == r && m.target == t) {
            m.mult += mult;
            return;
        }
    out.push_back({r, std::move(t), mult});
}

inline std::vector<OtActionMove> step_ot_actions(const OtTerm& t, std::size_t budget) {
    std::vector<OtActionMove> out;
    switch (t.kind()) {
    case Kind::Nil:
    case Kind::TimePrefix:
        break;
    case Kind::ActPrefix:
        out.push_back({t.name(), t.body()});
        break;
    case Kind::Choice:
        for (auto& m : step_ot_actions(t.left(), budget))
            add_action(out, std::move(m.name), std::move(m.target));
        for (auto& m : step_ot_actions(t.right(), budget))
            add_action(out, std::move(m.name), std::move(m.target));
        break;
    case Kind::Par: {
        const auto& sync = t.names();
        auto lhs = step_ot_actions(t.left(), budget);
        auto rhs = step_ot_actions(t.right(), budget);
        for (const auto& m : lhs)
            if (!contains(sync, m.name))
                add_action(out, m.name, OtTerm::par(m.target, t.right(), sync));
        for (const auto& m : rhs)
            if (!contains(sync, m.name))
                add_action(out, m.name, OtTerm::par(t.left(), m.target, sync));
        for (const auto& l : lhs) {
            if (!contains(sync, l.name))
                continue;
            for (const auto& r : rhs)
                if (r.name == l.name)
                    add_action(out, l.name, OtTerm::par(l.target, r.target, sync));
        }
        break;
    }
    case Kind::Hide:
        for (auto& m : step_ot_actions(t.body(), budget))
            add_action(out, contains(t.names(), m.name) ? ActionName::tau() : m.name, OtTerm::hide(m.target, t.names()));
        break;
    case Kind::Relab:
        for (auto& m : step_ot_actions(t.body(), budget))
            add_action(out, t.relabeling().apply(m.name), OtTerm::relabel(m.target, t.relabeling()));
        break;
    case Kind::Rec:
        if (budget == 0)
            throw UnguardedRecursion("recursion does not reach a prefix: rec " + t.var_name());
        return step_ot_actions(unfold(t), budget - 1);
    case Kind::Var:
        throw std::invalid_argument("cannot step an open term: free variable " + t.var_name());
    default:
        throw std::invalid_argument("not an OTMPC operator");
    }
    return out;
}

inline std::vector<OtTimeMove> step_ot_time(const OtTerm& t, std::size_t budget) {
    std::vector<OtTimeMove> out;
    switch (t.kind()) {
    case Kind::Nil:
    case Kind::ActPrefix:
        break;
    case Kind::TimePrefix:
        out.push_back({t.rate(), t.body(), 1});
        break;
    case Kind::Choice:
        for (auto& m : step_ot_time(t.left(), budget))
            add_time(out, m.rate, std::move(m.target), m.mult);
        for (auto& m : step_ot_time(t.right(), budget))
            add_time(out, m.rate, std::move(m.target), m.mult);
        break;
    case Kind::Par:
        // Delays never synchronize: both sides always interleave.
        for (auto& m : step_ot_time(t.left(), budget))
            add_time(out, m.rate, OtTerm::par(m.target, t.right(), t.names()), m.mult);
        for (auto& m : step_ot_time(t.right(), budget))
            add_time(out, m.rate, OtTerm::par(t.left(), m.target, t.names()), m.mult);
        break;
    case Kind::Hide:
        for (auto& m : step_ot_time(t.body(), budget))
            add_time(out, m.rate, OtTerm::hide(m.target, t.names()), m.mult);
        break;
    case Kind::Relab:
        for (auto& m : step_ot_time(t.body(), budget))
            add_time(out, m.rate, OtTerm::relabel(m.target, t.relabeling()), m.mult);
        break;
    case Kind::Rec:
        if (budget == 0)
            throw UnguardedRecursion("recursion does not reach a prefix: rec " + t.var_name());
        return step_ot_time(unfold(t), budget - 1);
    case Kind::Var:
        throw std::invalid_argument("cannot step an open term: free variable " + t.var_name());
    default:
        throw std::invalid_argument("not an OTMPC operator");
    }
    return out;
}

} // namespace detail

/// Action transitions of q. A set: repeated derivations of the same
/// (name, target) pair collapse to one element.
inline std::vector<OtActionMove> step_ot_actions(const OtTerm& q) {
    return detail::step_ot_actions(q, detail::rec_count(q) + 1);
}

/// Time transitions of q with proof multiplicities.
inline std::vector<OtTimeMove> step_ot_time(const OtTerm& q) {
    return detail::step_ot_time(q, detail::rec_count(q) + 1);
}

inline auto ot_stepper() {
    return [](const OtTerm& q) {
        std::vector<Step<OtTerm>> out;
        for (auto& m : step_ot_actions(q))
            out.push_back({Label::ot_act(std::move(m.name)), std::move(m.target), 1});
        for (auto& m : step_ot_time(q))
            out.push_back({Label::ot_time(m.rate), std::move(m.target), m.mult});
        return out;
    };
}

inline Mlts<OtTerm> build_ot(const OtTerm& q, std::size_t max_states = kDefaultMaxStates) {
    return build(CalculusTag::Ot, q, ot_stepper(), max_states);
}

template <class Pred>
Rate rate_ot(const OtTerm& q, Pred&& in_dest) {
    Rate total;
    for (const auto& m : step_ot_time(q))
        if (in_dest(m.target))
            total += scale(m.rate, m.mult);
    return total;
}

inline Rate total_rate_ot(const OtTerm& q) {
    return rate_ot(q, [](const OtTerm&) { return true; });
}

// ---------------------------------------------------------------------------
// Nondeterminism classification

namespace detail {

// Choice nodes reachable from q without crossing a prefix, unfolding
// recursion once per binder on the way.
inline void active_choices(const OtTerm& q, std::vector<OtTerm>& out, std::size_t budget) {
    switch (q.kind()) {
    case Kind::Choice:
        out.push_back(q);
        active_choices(q.left(), out, budget);
        active_choices(q.right(), out, budget);
        break;
    case Kind::Par:
        active_choices(q.left(), out, budget);
        active_choices(q.right(), out, budget);
        break;
    case Kind::Hide:
    case Kind::Relab:
        active_choices(q.body(), out, budget);
        break;
    case Kind::Rec:
        if (budget > 0)
            active_choices(unfold(q), out, budget - 1);
        break;
    default:
        break;
    }
}

// Over-approximates whether t may start with an action. Variables inherit
// the answer for their binder, which is sound for guarded terms.
inline bool may_act(const OtTerm& t, std::map<std::string, bool>& env) {
    switch (t.kind()) {
    case Kind::ActPrefix:
        return true;
    case Kind::Nil:
    case Kind::TimePrefix:
        return false;
    case Kind::Choice:
    case Kind::Par: {
        const bool l = may_act(t.left(), env);
        const bool r = may_act(t.right(), env);
        return l || r;
    }
    case Kind::Hide:
    case Kind::Relab:
        return may_act(t.body(), env);
    case Kind::Var: {
        auto it = env.find(t.var_name());
        return it != env.end() && it->second;
    }
    case Kind::Rec: {
        auto saved = env.find(t.var_name()) != env.end() ? std::optional<bool>(env[t.var_name()]) : std::nullopt;
        env[t.var_name()] = false;
        const bool r = may_act(t.body(), env);
        if (saved)
            env[t.var_name()] = *saved;
        else
            env.erase(t.var_name());
        return r;
    }
    default:
        return false;
    }
}

inline bool is_controlled_shape(const OtTerm& rec) {
    if (rec.kind() != Kind::Rec || rec.body().kind() != Kind::Choice)
        return false;
    const OtTerm l = rec.body().left();
    const OtTerm r = rec.body().right();
    return l.kind() == Kind::ActPrefix && l.name().is_tau() && l.body().kind() == Kind::Var &&
           l.body().var_name() == rec.var_name() && r.kind() == Kind::ActPrefix && !r.body().has_free(rec.var_name());
}

inline void controlled_walk(const OtTerm& t, std::map<std::string, bool>& env, bool parent_is_shape, bool& ok) {
    if (!ok)
        return;
    switch (t.kind()) {
    case Kind::Choice: {
        if (!parent_is_shape && may_act(t.left(), env) && may_act(t.right(), env)) {
            ok = false;
            return;
        }
        controlled_walk(t.left(), env, false, ok);
        controlled_walk(t.right(), env, false, ok);
        return;
    }
    case Kind::Par:
        controlled_walk(t.left(), env, false, ok);
        controlled_walk(t.right(), env, false, ok);
        return;
    case Kind::Rec: {
        // Record what the bound variable may do so nested Choice nodes that
        // mention it are judged against the unfolded behaviour.
        auto saved = env.find(t.var_name()) != env.end() ? std::optional<bool>(env[t.var_name()]) : std::nullopt;
        env[t.var_name()] = false;
        env[t.var_name()] = may_act(t.body(), env);
        controlled_walk(t.body(), env, is_controlled_shape(t), ok);
        if (saved)
            env[t.var_name()] = *saved;
        else
            env.erase(t.var_name());
        return;
    }
    case Kind::Nil:
    case Kind::Var:
        return;
    default:
        controlled_walk(t.body(), env, false, ok);
        return;
    }
}

} // namespace detail

/// True iff no reachable state of q contains an active choice whose two
/// summands can both perform an action. Interleaving of parallel
/// components is not counted as a choice.
inline bool has_no_nondeterminism(const OtTerm& q, std::size_t max_states = kDefaultMaxStates) {
    const auto m = build_ot(q, max_states);
    if (m.truncated())
        throw std::runtime_error("state space exceeds the bound; cannot classify");
    for (const auto& s : m.states()) {
        std::vector<OtTerm> choices;
        detail::active_choices(s, choices, detail::rec_count(s) + 1);
        for (const auto& c : choices)
            if (!step_ot_actions(c.left()).empty() && !step_ot_actions(c.right()).empty())
                return false;
    }
    return true;
}

/// True iff every choice between two action-capable summands is the body
/// of `rec Z : (tau.Z + a.Q)` with Z not free in Q.
inline bool has_controlled_nondeterminism(const OtTerm& q) {
    std::map<std::string, bool> env;
    bool ok = true;
    detail::controlled_walk(q, env, false, ok);
    return ok;
}

inline TermClass classify_ot(const OtTerm& q, std::size_t max_states = kDefaultMaxStates) {
    require_well_formed(q);
    return TermClass{is_sequential(q), is_sync_free(q), has_no_nondeterminism(q, max_states),
                     has_controlled_nondeterminism(q)};
}

} // namespace markcalc
