#pragma once

#include "markcalc/term.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace markcalc {

struct Violation {
    enum class Kind { FreeVariable, UnguardedRecursion };
    Kind kind;
    std::string variable;
    std::string path; // operator path from the root, e.g. "rec X/+ left"
    const void* node = nullptr;

    std::string message() const {
        return variable + (kind == Kind::FreeVariable ? " free" : " unguarded") + " at " +
               (path.empty() ? std::string("root") : path);
    }
};

struct WellFormedReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

class IllFormedTerm : public std::runtime_error {
public:
    explicit IllFormedTerm(WellFormedReport report)
        : std::runtime_error(describe(report)), report_(std::move(report)) {}
    const WellFormedReport& report() const { return report_; }

private:
    static std::string describe(const WellFormedReport& r) {
        std::string s = "ill-formed term:";
        for (const auto& v : r.violations)
            s += " " + v.message() + ";";
        return s;
    }
    WellFormedReport report_;
};

namespace detail {

inline std::string step_label(Kind k, const std::string& var, int child) {
    switch (k) {
    case Kind::Prefix:
    case Kind::ActPrefix:
    case Kind::TimePrefix:
        return "prefix";
    case Kind::Choice:
        return child == 0 ? "+ left" : "+ right";
    case Kind::Par:
        return child == 0 ? "|| left" : "|| right";
    case Kind::Hide:
        return "hide";
    case Kind::Relab:
        return "relabel";
    case Kind::Rec:
        return "rec " + var;
    default:
        return "?";
    }
}

template <Calculus C>
void check_wf(const Term<C>& t, std::map<std::string, bool>& guarded, const std::string& path,
              WellFormedReport& out) {
    auto join = [&](int child) {
        auto step = step_label(t.kind(), t.var_name(), child);
        return path.empty() ? step : path + "/" + step;
    };
    switch (t.kind()) {
    case Kind::Nil:
        return;
    case Kind::Var: {
        auto it = guarded.find(t.var_name());
        if (it == guarded.end())
            out.violations.push_back({Violation::Kind::FreeVariable, t.var_name(), path, t.id()});
        else if (!it->second)
            out.violations.push_back({Violation::Kind::UnguardedRecursion, t.var_name(), path, t.id()});
        return;
    }
    case Kind::Prefix:
    case Kind::ActPrefix:
    case Kind::TimePrefix: {
        auto inner = guarded;
        for (auto& [_, g] : inner)
            g = true;
        check_wf(t.body(), inner, join(0), out);
        return;
    }
    case Kind::Rec: {
        auto inner = guarded;
        inner[t.var_name()] = false;
        check_wf(t.body(), inner, join(0), out);
        return;
    }
    case Kind::Choice:
    case Kind::Par:
        check_wf(t.left(), guarded, join(0), out);
        check_wf(t.right(), guarded, join(1), out);
        return;
    case Kind::Hide:
    case Kind::Relab:
        check_wf(t.body(), guarded, join(0), out);
        return;
    }
}

} // namespace detail

/// Reports every free variable and every recursion variable that is not
/// beneath a prefix of its own binder. Shadowing resolves to the innermost
/// binder. Both action and time prefixes count as guards.
template <Calculus C>
WellFormedReport check_well_formed(const Term<C>& t) {
    WellFormedReport report;
    std::map<std::string, bool> guarded;
    detail::check_wf(t, guarded, "", report);
    return report;
}

template <Calculus C>
void require_well_formed(const Term<C>& t) {
    auto report = check_well_formed(t);
    if (!report.ok())
        throw IllFormedTerm(std::move(report));
}

/// No parallel composition anywhere.
template <Calculus C>
bool is_sequential(const Term<C>& t) {
    bool ok = true;
    for_each_subterm(t, [&](const Term<C>& s) { ok = ok && s.kind() != Kind::Par; });
    return ok;
}

/// Every parallel composition has an empty synchronization set.
template <Calculus C>
bool is_sync_free(const Term<C>& t) {
    bool ok = true;
    for_each_subterm(t, [&](const Term<C>& s) { ok = ok && (s.kind() != Kind::Par || s.names().empty()); });
    return ok;
}

/// Syntactic class flags. The nondeterminism flags only apply to OT terms.
struct TermClass {
    bool sequential = false;
    bool sync_free = false;
    std::optional<bool> no_nondet;
    std::optional<bool> controlled_nondet;

    friend bool operator==(const TermClass&, const TermClass&) = default;
};

inline TermClass classify_it(const ItTerm& t) {
    require_well_formed(t);
    return TermClass{is_sequential(t), is_sync_free(t), std::nullopt, std::nullopt};
}

namespace detail {

inline std::string z_scheme(std::size_t i) { return i == 0 ? "Z" : "Z" + std::to_string(i); }

} // namespace detail

/// Smallest of Z, Z1, Z2, ... that occurs nowhere in t, free or bound.
template <Calculus C>
std::string fresh_variable(const Term<C>& t) {
    const auto used = all_variables(t);
    for (std::size_t i = 0;; ++i)
        if (!used.count(detail::z_scheme(i)))
            return detail::z_scheme(i);
}

/// Smallest of Z, Z1, Z2, ... that does not occur free in t.
template <Calculus C>
std::string fresh_variable_not_free(const Term<C>& t) {
    for (std::size_t i = 0;; ++i)
        if (!t.has_free(detail::z_scheme(i)))
            return detail::z_scheme(i);
}

} // namespace markcalc
