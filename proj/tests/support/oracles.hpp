#pragma once

// Independent reference implementations used to cross-check the library.
//
// * Proof enumerators list every derivation of a transition as a separate
//   entry; counting equal entries gives the multiplicity.
// * The bisimulation oracle computes the greatest fixed point over the full
//   pair relation, one boolean per state pair, instead of refining blocks.

#include "markcalc/markcalc.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace markcalc::testing {

struct ItProof {
    ActionName name;
    Rate rate;
    ItTerm target;
};

struct OtTimeProof {
    Rate rate;
    OtTerm target;
};

inline std::vector<ItProof> it_proofs(const ItTerm& t, const RateComposer& otimes, int fuel = 64) {
    std::vector<ItProof> out;
    if (fuel == 0)
        return out;
    switch (t.kind()) {
    case Kind::Prefix:
        out.push_back({t.name(), t.rate(), t.body()});
        break;
    case Kind::Choice: {
        auto l = it_proofs(t.left(), otimes, fuel);
        auto r = it_proofs(t.right(), otimes, fuel);
        out.insert(out.end(), l.begin(), l.end());
        out.insert(out.end(), r.begin(), r.end());
        break;
    }
    case Kind::Par: {
        const NameSet& s = t.names();
        auto l = it_proofs(t.left(), otimes, fuel);
        auto r = it_proofs(t.right(), otimes, fuel);
        for (const auto& p : l)
            if (p.name.is_tau() || !s.count(p.name.str()))
                out.push_back({p.name, p.rate, ItTerm::par(p.target, t.right(), s)});
        for (const auto& p : r)
            if (p.name.is_tau() || !s.count(p.name.str()))
                out.push_back({p.name, p.rate, ItTerm::par(t.left(), p.target, s)});
        for (const auto& p : l)
            for (const auto& q : r)
                if (!p.name.is_tau() && s.count(p.name.str()) && p.name == q.name)
                    out.push_back({p.name, otimes.compose(p.rate, q.rate), ItTerm::par(p.target, q.target, s)});
        break;
    }
    case Kind::Hide:
        for (const auto& p : it_proofs(t.body(), otimes, fuel)) {
            const bool hidden = !p.name.is_tau() && t.names().count(p.name.str());
            out.push_back({hidden ? ActionName::tau() : p.name, p.rate, ItTerm::hide(p.target, t.names())});
        }
        break;
    case Kind::Relab:
        for (const auto& p : it_proofs(t.body(), otimes, fuel)) {
            ActionName a = p.name;
            if (!a.is_tau()) {
                auto it = t.relabeling().pairs().find(a.str());
                if (it != t.relabeling().pairs().end())
                    a = ActionName::visible(it->second);
            }
            out.push_back({a, p.rate, ItTerm::relabel(p.target, t.relabeling())});
        }
        break;
    case Kind::Rec:
        return it_proofs(substitute(t.body(), t.var_name(), t), otimes, fuel - 1);
    default:
        break;
    }
    return out;
}

inline std::vector<OtTimeProof> ot_time_proofs(const OtTerm& q, int fuel = 64) {
    std::vector<OtTimeProof> out;
    if (fuel == 0)
        return out;
    switch (q.kind()) {
    case Kind::TimePrefix:
        out.push_back({q.rate(), q.body()});
        break;
    case Kind::Choice: {
        auto l = ot_time_proofs(q.left(), fuel);
        auto r = ot_time_proofs(q.right(), fuel);
        out.insert(out.end(), l.begin(), l.end());
        out.insert(out.end(), r.begin(), r.end());
        break;
    }
    case Kind::Par:
        for (const auto& p : ot_time_proofs(q.left(), fuel))
            out.push_back({p.rate, OtTerm::par(p.target, q.right(), q.names())});
        for (const auto& p : ot_time_proofs(q.right(), fuel))
            out.push_back({p.rate, OtTerm::par(q.left(), p.target, q.names())});
        break;
    case Kind::Hide:
        for (const auto& p : ot_time_proofs(q.body(), fuel))
            out.push_back({p.rate, OtTerm::hide(p.target, q.names())});
        break;
    case Kind::Relab:
        for (const auto& p : ot_time_proofs(q.body(), fuel))
            out.push_back({p.rate, OtTerm::relabel(p.target, q.relabeling())});
        break;
    case Kind::Rec:
        return ot_time_proofs(substitute(q.body(), q.var_name(), q), fuel - 1);
    default:
        break;
    }
    return out;
}

/// Counts equal proofs: (name, rate, printed target) -> number of proofs.
inline std::map<std::tuple<std::string, Rate, std::string>, std::uint64_t>
count_it_proofs(const std::vector<ItProof>& proofs) {
    std::map<std::tuple<std::string, Rate, std::string>, std::uint64_t> out;
    for (const auto& p : proofs)
        ++out[{p.name.str(), p.rate, print(p.target)}];
    return out;
}

inline std::map<std::tuple<std::string, Rate, std::string>, std::uint64_t>
count_it_moves(const std::vector<ItMove>& moves) {
    std::map<std::tuple<std::string, Rate, std::string>, std::uint64_t> out;
    for (const auto& m : moves)
        out[{m.name.str(), m.rate, print(m.target)}] += m.mult;
    return out;
}

// ---------------------------------------------------------------------------
// Greatest fixed point over state pairs

enum class OracleMode { It, OtEager, OtLazy, OtMaxProgress };

inline OracleMode oracle_mode(OtVariant v) {
    switch (v) {
    case OtVariant::Eager: return OracleMode::OtEager;
    case OtVariant::Lazy: return OracleMode::OtLazy;
    default: return OracleMode::OtMaxProgress;
    }
}

template <class State>
Partition gfp_oracle(const Mlts<State>& m, OracleMode mode) {
    const std::size_t n = m.size();
    std::vector<std::vector<char>> rel(n, std::vector<char>(n, 1));

    // Rate of s into the class of c under rel, restricted to one label
    // name (IT) or to delays (OT, name empty).
    auto rate_into = [&](std::size_t s, std::size_t c, const std::string& name) {
        Rate total;
        for (const auto& t : m.outgoing(s)) {
            if (!rel[c][t.dst])
                continue;
            if (mode == OracleMode::It ? t.label.name.str() == name : t.label.is_time())
                total += scale(t.label.rate, t.mult);
        }
        return total;
    };
    auto can = [&](std::size_t s, bool tau_only) {
        for (const auto& t : m.outgoing(s))
            if (t.label.is_action() && (!tau_only || t.label.name.is_tau()))
                return true;
        return false;
    };
    auto simulates = [&](std::size_t s, std::size_t u) {
        for (const auto& t : m.outgoing(s)) {
            if (!t.label.is_action())
                continue;
            bool matched = false;
            for (const auto& w : m.outgoing(u))
                if (w.label.is_action() && w.label.name == t.label.name && rel[t.dst][w.dst]) {
                    matched = true;
                    break;
                }
            if (!matched)
                return false;
        }
        return true;
    };
    auto pair_ok = [&](std::size_t s, std::size_t u) {
        std::vector<std::string> names{""};
        if (mode == OracleMode::It) {
            names.clear();
            for (const auto& t : m.outgoing(s))
                names.push_back(t.label.name.str());
            for (const auto& t : m.outgoing(u))
                names.push_back(t.label.name.str());
        } else {
            if (!simulates(s, u) || !simulates(u, s))
                return false;
            bool compare = true;
            if (mode == OracleMode::OtEager)
                compare = !can(s, false) && !can(u, false);
            if (mode == OracleMode::OtMaxProgress)
                compare = !can(s, true) && !can(u, true);
            if (!compare)
                return true;
        }
        for (std::size_t c = 0; c < n; ++c)
            for (const auto& a : names)
                if (rate_into(s, c, a) != rate_into(u, c, a))
                    return false;
        return true;
    };

    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::vector<char>> next = rel;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t u = 0; u < n; ++u)
                if (rel[s][u] && !pair_ok(s, u)) {
                    next[s][u] = 0;
                    changed = true;
                }
        rel = std::move(next);
    }

    std::vector<std::size_t> block(n);
    for (std::size_t s = 0; s < n; ++s) {
        block[s] = s;
        for (std::size_t u = 0; u < s; ++u)
            if (rel[s][u]) {
                block[s] = block[u];
                break;
            }
    }
    return Partition(std::move(block));
}

} // namespace markcalc::testing
