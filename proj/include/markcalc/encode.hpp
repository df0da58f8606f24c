#pragma once

#include "markcalc/bisim.hpp"
#include "markcalc/parser.hpp"
#include "markcalc/semantics_it.hpp"
#include "markcalc/semantics_ot.hpp"
#include "markcalc/wellformed.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace markcalc {

/// Raised when a term lies outside the domain of the requested translation.
class EncodeError : public std::runtime_error {
public:
    enum class Kind { NotSequential, NotSyncFree };

    EncodeError(Kind k, ItTerm offending)
        : std::runtime_error(message(k, offending)), kind_(k), offending_(std::move(offending)) {}

    Kind kind() const { return kind_; }
    /// The parallel composition that violates the class restriction.
    const ItTerm& offending() const { return offending_; }

private:
    static std::string message(Kind k, const ItTerm& t) {
        if (k == Kind::NotSequential)
            return "NotSequential: the lazy encoding is defined only for sequential process terms; found " + print(t);
        return "NotSyncFree: this encoding is defined only for synchronization-free process terms; found " + print(t);
    }

    Kind kind_;
    ItTerm offending_;
};

/// Structural translation without the class check; also defined on open
/// terms. Prefixes become a delay followed by the action; under maximal
/// progress the action is offered inside a tau-selfloop recursion.
inline OtTerm translate(const ItTerm& p, OtVariant v) {
    switch (p.kind()) {
    case Kind::Nil:
        return OtTerm::nil();
    case Kind::Prefix: {
        OtTerm cont = translate(p.body(), v);
        if (v != OtVariant::MaxProgress)
            return OtTerm::delay(p.rate(), OtTerm::act(p.name(), cont));
        const std::string z = fresh_variable_not_free(cont);
        return OtTerm::delay(p.rate(),
                             OtTerm::rec(z, OtTerm::choice(OtTerm::act(ActionName::tau(), OtTerm::var(z)),
                                                           OtTerm::act(p.name(), cont))));
    }
    case Kind::Choice:
        return OtTerm::choice(translate(p.left(), v), translate(p.right(), v));
    case Kind::Par:
        return OtTerm::par(translate(p.left(), v), translate(p.right(), v), p.names());
    case Kind::Hide:
        return OtTerm::hide(translate(p.body(), v), p.names());
    case Kind::Relab:
        return OtTerm::relabel(translate(p.body(), v), p.relabeling());
    case Kind::Var:
        return OtTerm::var(p.var_name());
    case Kind::Rec:
        return OtTerm::rec(p.var_name(), translate(p.body(), v));
    default:
        throw std::invalid_argument("not an ITMPC operator");
    }
}

/// First subterm that takes p outside the domain of the encoding for v.
inline std::optional<EncodeError> class_violation(const ItTerm& p, OtVariant v) {
    std::optional<EncodeError> err;
    for_each_subterm(p, [&](const ItTerm& s) {
        if (err || s.kind() != Kind::Par)
            return;
        if (v == OtVariant::Lazy)
            err.emplace(EncodeError::Kind::NotSequential, s);
        else if (!s.names().empty())
            err.emplace(EncodeError::Kind::NotSyncFree, s);
    });
    return err;
}

/// Checked translation: p must be closed, guarded and in the variant's class.
inline OtTerm encode(const ItTerm& p, OtVariant v) {
    require_well_formed(p);
    if (auto err = class_violation(p, v))
        throw *err;
    return translate(p, v);
}

inline OtTerm gamma_lazy(const ItTerm& p) { return encode(p, OtVariant::Lazy); }
inline OtTerm gamma_eager(const ItTerm& p) { return encode(p, OtVariant::Eager); }
inline OtTerm gamma_max_progress(const ItTerm& p) { return encode(p, OtVariant::MaxProgress); }

// ---------------------------------------------------------------------------
// Lemma self-checks

struct LemmaReport {
    std::size_t states_checked = 0;
    std::size_t substitutions_checked = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

struct LemmaOptions {
    std::size_t max_states = 2000;
    std::size_t max_substitutions = 64;
    std::vector<std::string> substitution_vars{"Y", "W"};
};

namespace detail {

struct Corresponding {
    ActionName name;
    Rate rate;
    OtTerm target;
    std::uint64_t mult;
};

inline void add_corresponding(std::vector<Corresponding>& out, const ActionName& a, const Rate& r, const OtTerm& t,
                              std::uint64_t m) {
    for (auto& c : out)
        if (c.name == a && c.rate == r && c.target == t) {
            c.mult += m;
            return;
        }
    out.push_back({a, r, t, m});
}

inline bool same_multiset(const std::vector<Corresponding>& a, const std::vector<Corresponding>& b) {
    if (a.size() != b.size())
        return false;
    for (const auto& x : a) {
        bool found = false;
        for (const auto& y : b)
            if (x.name == y.name && x.rate == y.rate && x.target == y.target) {
                found = x.mult == y.mult;
                break;
            }
        if (!found)
            return false;
    }
    return true;
}

// Exit-rate lemma and transition-correspondence lemma for one IT state.
inline void check_state(const ItTerm& p, OtVariant v, LemmaReport& report) {
    const OtTerm q = translate(p, v);
    const std::string where = " at " + print(p);

    if (!step_ot_actions(q).empty())
        report.failures.push_back("translated state can perform an action" + where);
    const Rate rit = total_rate_it(p), rot = total_rate_ot(q);
    if (rit != rot)
        report.failures.push_back("total exit rate " + rit.to_string() + " vs " + rot.to_string() + where);

    std::vector<Corresponding> expected, actual;
    for (const auto& m : step_it(p))
        add_corresponding(expected, m.name, m.rate, translate(m.target, v), m.mult);

    for (const auto& tm : step_ot_time(q)) {
        const auto acts = step_ot_actions(tm.target);
        std::vector<OtActionMove> others;
        bool selfloop = false;
        for (const auto& a : acts) {
            if (v == OtVariant::MaxProgress && a.name.is_tau() && a.target == tm.target && !selfloop)
                selfloop = true;
            else
                others.push_back(a);
        }
        const bool shape_ok = others.size() == 1 && (v != OtVariant::MaxProgress || selfloop);
        if (!shape_ok) {
            report.failures.push_back("after delay (" + tm.rate.to_string() + ") to " + print(tm.target) +
                                      " the action transitions do not have the expected shape" + where);
            continue;
        }
        add_corresponding(actual, others[0].name, tm.rate, others[0].target, tm.mult);
    }
    if (!same_multiset(expected, actual))
        report.failures.push_back("transition correspondence fails" + where);
}

} // namespace detail

/// Verifies the translation lemmas for p under variant v:
/// (a) every reachable translated state is action-free and keeps the total
///     exit rate;
/// (b) each (a, r) move of a reachable state corresponds, with the same
///     multiplicity, to an r-delay into a state whose only action (besides
///     the tau-selfloop under maximal progress) is a into the translation
///     of the target;
/// (c) translation commutes with replacing a closed recursion by a variable.
inline LemmaReport check_lemmas(const ItTerm& p, OtVariant v, const LemmaOptions& opt = {}) {
    require_well_formed(p);
    if (auto err = class_violation(p, v))
        throw *err;
    LemmaReport report;

    const auto m = build_it(p, RateComposer::product(), opt.max_states);
    if (m.truncated())
        report.failures.push_back("state space truncated at " + std::to_string(opt.max_states) + " states");
    for (const auto& s : m.states()) {
        detail::check_state(s, v, report);
        ++report.states_checked;
    }

    std::vector<ItTerm> subterms, closed_recs;
    for_each_subterm(p, [&](const ItTerm& s) {
        subterms.push_back(s);
        if (s.kind() == Kind::Rec && s.is_closed())
            closed_recs.push_back(s);
    });
    for (const auto& r : closed_recs) {
        for (const auto& s : subterms) {
            for (const auto& y : opt.substitution_vars) {
                if (report.substitutions_checked >= opt.max_substitutions)
                    return report;
                const OtTerm lhs = translate(replace_subterm(s, r, y), v);
                const OtTerm rhs = replace_subterm(translate(s, v), translate(r, v), y);
                ++report.substitutions_checked;
                if (!(lhs == rhs))
                    report.failures.push_back("substitution commutation fails for " + print(s) + " with " + print(r) +
                                              " -> " + y + ": " + print(lhs) + " vs " + print(rhs));
            }
        }
    }
    return report;
}

} // namespace markcalc
