#pragma once

#include "markcalc/mlts.hpp"
#include "markcalc/semantics_it.hpp"
#include "markcalc/semantics_ot.hpp"
#include "markcalc/wellformed.hpp"

#include "json.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace markcalc {

/// Partition of the states of a system. Block ids are canonical: blocks are
/// numbered in order of their smallest state.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<std::size_t> block_of) : block_of_(std::move(block_of)) { canonicalize(); }

    static Partition single_block(std::size_t n) { return Partition(std::vector<std::size_t>(n, 0)); }

    std::size_t size() const { return block_of_.size(); }
    std::size_t num_blocks() const { return num_blocks_; }
    std::size_t block_of(std::size_t s) const { return block_of_[s]; }
    const std::vector<std::size_t>& block_map() const { return block_of_; }
    bool same_block(std::size_t a, std::size_t b) const { return block_of_[a] == block_of_[b]; }

    std::vector<std::vector<std::size_t>> blocks() const {
        std::vector<std::vector<std::size_t>> out(num_blocks_);
        for (std::size_t s = 0; s < block_of_.size(); ++s)
            out[block_of_[s]].push_back(s);
        return out;
    }

    /// Every block of *this lies inside one block of `coarser`.
    bool refines(const Partition& coarser) const {
        if (coarser.size() != size())
            return false;
        std::vector<std::optional<std::size_t>> image(num_blocks_);
        for (std::size_t s = 0; s < size(); ++s) {
            auto& img = image[block_of_[s]];
            if (!img)
                img = coarser.block_of(s);
            else if (*img != coarser.block_of(s))
                return false;
        }
        return true;
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    void canonicalize() {
        std::map<std::size_t, std::size_t> renumber;
        for (auto& b : block_of_) {
            auto [it, _] = renumber.emplace(b, renumber.size());
            b = it->second;
        }
        num_blocks_ = renumber.size();
    }

    std::vector<std::size_t> block_of_;
    std::size_t num_blocks_ = 0;
};

enum class OtVariant { Eager, Lazy, MaxProgress };

inline const char* to_string(OtVariant v) {
    switch (v) {
    case OtVariant::Eager: return "eager";
    case OtVariant::Lazy: return "lazy";
    case OtVariant::MaxProgress: return "mp";
    }
    return "?";
}

inline OtVariant ot_variant_from_string(const std::string& s) {
    if (s == "eager") return OtVariant::Eager;
    if (s == "lazy") return OtVariant::Lazy;
    if (s == "mp") return OtVariant::MaxProgress;
    throw std::invalid_argument("unknown variant '" + s + "' (expected eager, lazy or mp)");
}

class TruncatedSystem : public std::runtime_error {
public:
    TruncatedSystem() : std::runtime_error("state space was truncated; no equivalence judgement possible") {}
};

/// Per-state refinement signature. `moves` is the set of (action, target
/// block) pairs used for classical action matching; `rates` sums
/// rate * multiplicity per (name, target block), with name "" for delays.
struct Signature {
    std::vector<std::pair<ActionName, std::size_t>> moves;
    bool rates_compared = true;
    std::vector<std::tuple<std::string, std::size_t, Rate>> rates;

    friend bool operator==(const Signature&, const Signature&) = default;
    friend auto operator<=>(const Signature&, const Signature&) = default;
};

/// Why two states ended up in different blocks.
struct Evidence {
    std::size_t round = 0;
    std::string detail;
};

struct RefinementResult {
    Partition partition;
    std::size_t rounds = 0;
    std::optional<Evidence> separation; // for the watched pair, if separated
};

namespace detail {

inline std::string describe_difference(const Signature& a, const Signature& b, std::size_t sa, std::size_t sb) {
    const std::string A = "state " + std::to_string(sa), B = "state " + std::to_string(sb);
    for (const auto& mv : a.moves)
        if (!std::binary_search(b.moves.begin(), b.moves.end(), mv))
            return A + " has action " + mv.first.str() + " into block " + std::to_string(mv.second) + ", " + B +
                   " does not";
    for (const auto& mv : b.moves)
        if (!std::binary_search(a.moves.begin(), a.moves.end(), mv))
            return B + " has action " + mv.first.str() + " into block " + std::to_string(mv.second) + ", " + A +
                   " does not";
    if (a.rates_compared != b.rates_compared)
        return "time rates are compared for " + (a.rates_compared ? A : B) + " but not for " +
               (a.rates_compared ? B : A);
    std::map<std::pair<std::string, std::size_t>, std::pair<Rate, Rate>> cmp;
    for (const auto& [n, blk, r] : a.rates)
        cmp[{n, blk}].first = r;
    for (const auto& [n, blk, r] : b.rates)
        cmp[{n, blk}].second = r;
    for (const auto& [key, rr] : cmp)
        if (rr.first != rr.second)
            return (key.first.empty() ? std::string("delay") : "action " + key.first) + " rate into block " +
                   std::to_string(key.second) + ": " + rr.first.to_string() + " at " + A + " vs " +
                   rr.second.to_string() + " at " + B;
    return "signatures differ";
}

} // namespace detail

/// Iterated signature refinement from the single-block partition.
///
/// `signature(s, partition)` must depend only on the block ids of s's
/// successors. Each round splits every block by signature; the loop stops
/// when a round creates no new block. When `watch` names a pair of states,
/// the round and signature difference that first separated them is kept.
template <class SigFn>
RefinementResult refine(std::size_t n, SigFn&& signature,
                        std::optional<std::pair<std::size_t, std::size_t>> watch = std::nullopt) {
    RefinementResult result;
    result.partition = Partition::single_block(n);
    for (;;) {
        ++result.rounds;
        std::vector<Signature> sigs;
        sigs.reserve(n);
        for (std::size_t s = 0; s < n; ++s)
            sigs.push_back(signature(s, result.partition));
        std::map<std::pair<std::size_t, const Signature*>, std::size_t,
                 decltype([](const auto& x, const auto& y) {
                     return x.first != y.first ? x.first < y.first : *x.second < *y.second;
                 })>
            ids;
        std::vector<std::size_t> next(n);
        for (std::size_t s = 0; s < n; ++s) {
            auto [it, _] = ids.emplace(std::make_pair(result.partition.block_of(s), &sigs[s]), ids.size());
            next[s] = it->second;
        }
        Partition refined(std::move(next));
        if (watch && !result.separation && result.partition.same_block(watch->first, watch->second) &&
            !refined.same_block(watch->first, watch->second)) {
            result.separation = Evidence{result.rounds, detail::describe_difference(sigs[watch->first],
                                                                                    sigs[watch->second],
                                                                                    watch->first, watch->second)};
        }
        const bool stable = refined.num_blocks() == result.partition.num_blocks();
        result.partition = std::move(refined);
        if (stable)
            return result;
    }
}

/// Signature for integrated-time Markovian bisimilarity: the rate into
/// every (name, block) pair.
template <class State>
Signature it_signature(const Mlts<State>& m, std::size_t s, const Partition& p) {
    std::map<std::pair<std::string, std::size_t>, Rate> acc;
    for (const auto& t : m.outgoing(s))
        acc[{t.label.name.str(), p.block_of(t.dst)}] += scale(t.label.rate, t.mult);
    Signature sig;
    for (auto& [key, r] : acc)
        sig.rates.emplace_back(key.first, key.second, r);
    return sig;
}

/// Signature for the orthogonal-time variants: the action moves into blocks,
/// plus the delay rate into each block when the variant compares rates at s.
template <class State>
Signature ot_signature(const Mlts<State>& m, std::size_t s, const Partition& p, OtVariant v) {
    Signature sig;
    bool any_action = false, any_tau = false;
    std::map<std::size_t, Rate> delay;
    for (const auto& t : m.outgoing(s)) {
        if (t.label.is_action()) {
            any_action = true;
            any_tau = any_tau || t.label.name.is_tau();
            sig.moves.emplace_back(t.label.name, p.block_of(t.dst));
        } else {
            delay[p.block_of(t.dst)] += scale(t.label.rate, t.mult);
        }
    }
    std::sort(sig.moves.begin(), sig.moves.end());
    sig.moves.erase(std::unique(sig.moves.begin(), sig.moves.end()), sig.moves.end());
    switch (v) {
    case OtVariant::Eager: sig.rates_compared = !any_action; break;
    case OtVariant::Lazy: sig.rates_compared = true; break;
    case OtVariant::MaxProgress: sig.rates_compared = !any_tau; break;
    }
    if (sig.rates_compared)
        for (auto& [blk, r] : delay)
            sig.rates.emplace_back("", blk, r);
    return sig;
}

template <class State>
RefinementResult bisim_it_detailed(const Mlts<State>& m,
                                   std::optional<std::pair<std::size_t, std::size_t>> watch = std::nullopt) {
    if (m.truncated())
        throw TruncatedSystem();
    if (m.calculus() != CalculusTag::It)
        throw std::invalid_argument("integrated-time bisimilarity needs an IT system");
    return refine(m.size(), [&](std::size_t s, const Partition& p) { return it_signature(m, s, p); }, watch);
}

template <class State>
RefinementResult bisim_ot_detailed(const Mlts<State>& m, OtVariant v,
                                   std::optional<std::pair<std::size_t, std::size_t>> watch = std::nullopt) {
    if (m.truncated())
        throw TruncatedSystem();
    if (m.calculus() != CalculusTag::Ot)
        throw std::invalid_argument("orthogonal-time bisimilarity needs an OT system");
    return refine(m.size(), [&](std::size_t s, const Partition& p) { return ot_signature(m, s, p, v); }, watch);
}

/// Coarsest integrated-time Markovian bisimulation on m.
template <class State>
Partition bisim_it(const Mlts<State>& m) {
    return bisim_it_detailed(m).partition;
}

/// Coarsest eager / lazy / maximal-progress orthogonal-time Markovian bisimulation on m.
template <class State>
Partition bisim_ot(const Mlts<State>& m, OtVariant v) {
    return bisim_ot_detailed(m, v).partition;
}

/// {blocks: [[...]], variant, stable: true}
inline nlohmann::json partition_to_json(const Partition& p, const std::string& variant) {
    return {{"blocks", p.blocks()}, {"variant", variant}, {"stable", true}};
}

// ---------------------------------------------------------------------------

struct Verdict {
    enum class Kind { Equivalent, Inequivalent, Inconclusive };
    Kind kind = Kind::Inconclusive;
    std::optional<Evidence> evidence;
    std::size_t states = 0;

    bool equivalent() const { return kind == Kind::Equivalent; }
};

inline const char* to_string(Verdict::Kind k) {
    switch (k) {
    case Verdict::Kind::Equivalent: return "equivalent";
    case Verdict::Kind::Inequivalent: return "inequivalent";
    case Verdict::Kind::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct CheckOptions {
    OtVariant variant = OtVariant::Lazy; // ignored for IT
    RateComposer otimes = RateComposer::product();
    std::size_t max_states = kDefaultMaxStates;
};

namespace detail {

template <class State>
Verdict judge(const Mlts<State>& m, const RefinementResult& r) {
    Verdict v;
    v.states = m.size();
    const auto a = m.roots().at(0), b = m.roots().at(1);
    v.kind = r.partition.same_block(a, b) ? Verdict::Kind::Equivalent : Verdict::Kind::Inequivalent;
    v.evidence = r.separation;
    return v;
}

} // namespace detail

/// Decides t1 ~ t2 on one system built over the union of both state spaces.
template <Calculus C>
Verdict equivalent(const Term<C>& t1, const Term<C>& t2, const CheckOptions& opt = {}) {
    require_well_formed(t1);
    require_well_formed(t2);
    if constexpr (std::is_same_v<C, It>) {
        const auto m = build(CalculusTag::It, std::vector<ItTerm>{t1, t2}, it_stepper(opt.otimes), opt.max_states);
        if (m.truncated())
            return {Verdict::Kind::Inconclusive, std::nullopt, m.size()};
        const auto r = bisim_it_detailed(m, std::make_pair(m.roots()[0], m.roots()[1]));
        return detail::judge(m, r);
    } else {
        const auto m = build(CalculusTag::Ot, std::vector<OtTerm>{t1, t2}, ot_stepper(), opt.max_states);
        if (m.truncated())
            return {Verdict::Kind::Inconclusive, std::nullopt, m.size()};
        const auto r = bisim_ot_detailed(m, opt.variant, std::make_pair(m.roots()[0], m.roots()[1]));
        return detail::judge(m, r);
    }
}

} // namespace markcalc
