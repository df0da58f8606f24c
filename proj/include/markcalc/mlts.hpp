#pragma once

#include "markcalc/action.hpp"
#include "markcalc/rate.hpp"

#include "json.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace markcalc {

enum class CalculusTag { It, Ot };

inline const char* to_string(CalculusTag c) { return c == CalculusTag::It ? "it" : "ot"; }

/// Transition label: (a, rate) in IT systems; an action or a delay in OT systems.
struct Label {
    enum class Kind : std::uint8_t { ItAct, OtAct, OtTime };

    Kind kind = Kind::ItAct;
    ActionName name;
    Rate rate;

    static Label it_act(ActionName a, Rate r) { return {Kind::ItAct, std::move(a), r}; }
    static Label ot_act(ActionName a) { return {Kind::OtAct, std::move(a), Rate{}}; }
    static Label ot_time(Rate r) { return {Kind::OtTime, ActionName::tau(), r}; }

    bool is_action() const { return kind != Kind::OtTime; }
    bool is_time() const { return kind == Kind::OtTime; }

    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label& a, const Label& b) {
        return std::tie(a.kind, a.name, a.rate) <=> std::tie(b.kind, b.name, b.rate);
    }
};

/// "a,2"  "a"  "(2)".
inline std::string label_text(const Label& l) {
    switch (l.kind) {
    case Label::Kind::ItAct: return l.name.str() + "," + l.rate.to_string();
    case Label::Kind::OtAct: return l.name.str();
    case Label::Kind::OtTime: return "(" + l.rate.to_string() + ")";
    }
    return {};
}

struct Transition {
    std::size_t src = 0;
    Label label;
    std::size_t dst = 0;
    std::uint64_t mult = 1;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// One successor produced by a stepper: label, target and proof multiplicity.
template <class State>
struct Step {
    Label label;
    State target;
    std::uint64_t mult = 1;
};

/// Labeled multitransition system.
///
/// Identical (src, label, dst) triples are stored once with summed
/// multiplicity. Transitions are sorted by source, so the outgoing edges of
/// a state form one contiguous run.
template <class State>
class Mlts {
public:
    Mlts() = default;

    /// Assembles a system from explicit states and raw (possibly repeated) transitions.
    Mlts(CalculusTag tag, std::vector<State> states, std::vector<Transition> raw, std::vector<std::size_t> roots = {0},
         bool truncated = false)
        : tag_(tag), states_(std::move(states)), roots_(std::move(roots)), truncated_(truncated) {
        std::map<std::tuple<std::size_t, Label, std::size_t>, std::uint64_t> merged;
        for (const auto& t : raw) {
            if (t.src >= states_.size() || t.dst >= states_.size())
                throw std::out_of_range("transition endpoint is not a state");
            if (t.mult == 0)
                throw std::invalid_argument("transition multiplicity must be positive");
            if ((tag_ == CalculusTag::It) != (t.label.kind == Label::Kind::ItAct))
                throw std::invalid_argument("label kind does not match the calculus");
            merged[{t.src, t.label, t.dst}] += t.mult;
        }
        transitions_.reserve(merged.size());
        for (const auto& [key, mult] : merged)
            transitions_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mult});
        offsets_.assign(states_.size() + 1, 0);
        for (const auto& t : transitions_)
            ++offsets_[t.src + 1];
        for (std::size_t i = 0; i < states_.size(); ++i)
            offsets_[i + 1] += offsets_[i];
        for (auto r : roots_)
            if (r >= states_.size() && !states_.empty())
                throw std::out_of_range("root is not a state");
    }

    CalculusTag calculus() const { return tag_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<State>& states() const { return states_; }
    const State& state(std::size_t i) const { return states_[i]; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const std::vector<std::size_t>& roots() const { return roots_; }
    std::size_t initial() const { return 0; }
    bool truncated() const { return truncated_; }

    std::span<const Transition> outgoing(std::size_t s) const {
        return {transitions_.data() + offsets_[s], transitions_.data() + offsets_[s + 1]};
    }

    friend bool operator==(const Mlts& a, const Mlts& b) {
        return a.tag_ == b.tag_ && a.states_ == b.states_ && a.roots_ == b.roots_ &&
               a.transitions_ == b.transitions_ && a.truncated_ == b.truncated_;
    }

private:
    CalculusTag tag_ = CalculusTag::It;
    std::vector<State> states_;
    std::vector<std::size_t> roots_{0};
    std::vector<Transition> transitions_;
    std::vector<std::size_t> offsets_{0};
    bool truncated_ = false;
};

inline constexpr std::size_t kDefaultMaxStates = 10000;

/// Breadth-first closure of `roots` under `stepper`.
///
/// States are deduplicated by equality of State. Index 0 is the first root;
/// roots()[i] is the index of roots[i]. When discovering a new state would
/// exceed max_states, exploration stops and the result is marked truncated.
template <class State, class Stepper>
Mlts<State> build(CalculusTag tag, const std::vector<State>& roots, Stepper&& stepper,
                  std::size_t max_states = kDefaultMaxStates) {
    if (max_states == 0)
        throw std::invalid_argument("max_states must be positive");
    std::vector<State> states;
    std::unordered_map<State, std::size_t> index;
    std::vector<Transition> raw;
    std::vector<std::size_t> root_idx;
    std::deque<std::size_t> queue;
    bool truncated = false;

    auto intern = [&](const State& s) -> std::optional<std::size_t> {
        if (auto it = index.find(s); it != index.end())
            return it->second;
        if (states.size() >= max_states) {
            truncated = true;
            return std::nullopt;
        }
        states.push_back(s);
        index.emplace(s, states.size() - 1);
        queue.push_back(states.size() - 1);
        return states.size() - 1;
    };

    for (const auto& r : roots) {
        auto i = intern(r);
        if (!i)
            break;
        root_idx.push_back(*i);
    }
    while (!queue.empty() && !truncated) {
        const std::size_t s = queue.front();
        queue.pop_front();
        for (auto& step : stepper(states[s])) {
            auto d = intern(step.target);
            if (!d)
                break;
            raw.push_back({s, step.label, *d, step.mult});
        }
    }
    if (root_idx.empty())
        root_idx.push_back(0);
    return Mlts<State>(tag, std::move(states), std::move(raw), std::move(root_idx), truncated);
}

template <class State, class Stepper>
Mlts<State> build(CalculusTag tag, const State& root, Stepper&& stepper, std::size_t max_states = kDefaultMaxStates) {
    return build(tag, std::vector<State>{root}, std::forward<Stepper>(stepper), max_states);
}

// ---------------------------------------------------------------------------
// Export / import

/// DOT digraph; edges labelled "a,2", "a" or "(2)", with " [×k]" when k > 1.
template <class State, class Printer>
std::string export_dot(const Mlts<State>& m, Printer&& print_state) {
    auto escape = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\')
                out += '\\';
            out += c;
        }
        return out;
    };
    std::ostringstream os;
    os << "digraph mlts {\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        os << "  s" << i << " [label=\"" << escape(print_state(m.state(i))) << "\"";
        if (i == m.initial())
            os << ", shape=doublecircle";
        os << "];\n";
    }
    for (const auto& t : m.transitions()) {
        os << "  s" << t.src << " -> s" << t.dst << " [label=\"" << escape(label_text(t.label));
        if (t.mult > 1)
            os << " [×" << t.mult << "]";
        os << "\"];\n";
    }
    if (m.truncated())
        os << "  // truncated\n";
    os << "}\n";
    return os.str();
}

inline nlohmann::json label_to_json(const Label& l) {
    nlohmann::json j;
    switch (l.kind) {
    case Label::Kind::ItAct:
        j["kind"] = "act";
        j["name"] = l.name.str();
        j["rate"] = l.rate.to_string();
        break;
    case Label::Kind::OtAct:
        j["kind"] = "act";
        j["name"] = l.name.str();
        break;
    case Label::Kind::OtTime:
        j["kind"] = "time";
        j["rate"] = l.rate.to_string();
        break;
    }
    return j;
}

inline Label label_from_json(const nlohmann::json& j, CalculusTag tag) {
    auto rate = [&] {
        Rate r;
        if (!Rate::parse(j.at("rate").get<std::string>(), r) || !r.is_positive())
            throw std::invalid_argument("bad rate in label");
        return r;
    };
    auto name = [&] {
        auto n = j.at("name").get<std::string>();
        return n == kTauName ? ActionName::tau() : ActionName::visible(n);
    };
    const auto kind = j.at("kind").get<std::string>();
    if (tag == CalculusTag::It) {
        if (kind != "act")
            throw std::invalid_argument("IT systems only carry action labels");
        return Label::it_act(name(), rate());
    }
    if (kind == "act")
        return Label::ot_act(name());
    if (kind == "time")
        return Label::ot_time(rate());
    throw std::invalid_argument("unknown label kind '" + kind + "'");
}

/// {calculus, states:[string], initial:0, roots, transitions:[{src,label,dst,mult}], truncated}
template <class State, class Printer>
std::string export_json(const Mlts<State>& m, Printer&& print_state, int indent = 2) {
    nlohmann::json j;
    j["calculus"] = to_string(m.calculus());
    j["states"] = nlohmann::json::array();
    for (const auto& s : m.states())
        j["states"].push_back(print_state(s));
    j["initial"] = m.initial();
    j["roots"] = m.roots();
    j["transitions"] = nlohmann::json::array();
    for (const auto& t : m.transitions())
        j["transitions"].push_back({{"src", t.src}, {"label", label_to_json(t.label)}, {"dst", t.dst}, {"mult", t.mult}});
    j["truncated"] = m.truncated();
    return j.dump(indent);
}

template <class State, class StateParser>
Mlts<State> import_json(const std::string& text, StateParser&& parse_state) {
    const auto j = nlohmann::json::parse(text);
    const auto calc = j.at("calculus").get<std::string>();
    if (calc != "it" && calc != "ot")
        throw std::invalid_argument("unknown calculus '" + calc + "'");
    const CalculusTag tag = calc == "it" ? CalculusTag::It : CalculusTag::Ot;
    if (j.value("initial", std::size_t{0}) != 0)
        throw std::invalid_argument("initial state must have index 0");
    std::vector<State> states;
    for (const auto& s : j.at("states"))
        states.push_back(parse_state(s.get<std::string>()));
    std::vector<Transition> raw;
    for (const auto& t : j.at("transitions"))
        raw.push_back({t.at("src").get<std::size_t>(), label_from_json(t.at("label"), tag), t.at("dst").get<std::size_t>(),
                       t.at("mult").get<std::uint64_t>()});
    std::vector<std::size_t> roots = j.value("roots", std::vector<std::size_t>{0});
    return Mlts<State>(tag, std::move(states), std::move(raw), std::move(roots), j.value("truncated", false));
}

// ---------------------------------------------------------------------------
// CTMC extraction

class NotMarkovian : public std::runtime_error {
public:
    explicit NotMarkovian(std::size_t state)
        : std::runtime_error("state " + std::to_string(state) + " has both action and time transitions"),
          state_(state) {}
    std::size_t state() const { return state_; }

private:
    std::size_t state_;
};

using RateMatrix = std::vector<std::vector<Rate>>;

/// Entry (i,j) = sum of rate * multiplicity over transitions i -> j, names
/// dropped. The diagonal only holds selfloop rates. For OT systems only time
/// transitions count, and a state mixing action and time moves is rejected.
template <class State>
RateMatrix extract_ctmc(const Mlts<State>& m) {
    RateMatrix q(m.size(), std::vector<Rate>(m.size()));
    for (std::size_t s = 0; s < m.size(); ++s) {
        bool has_act = false, has_time = false;
        for (const auto& t : m.outgoing(s)) {
            if (t.label.kind == Label::Kind::OtAct) {
                has_act = true;
                continue;
            }
            if (t.label.is_time())
                has_time = true;
            q[s][t.dst] += scale(t.label.rate, t.mult);
        }
        if (has_act && has_time)
            throw NotMarkovian(s);
    }
    return q;
}

inline nlohmann::json rate_matrix_to_json(const RateMatrix& q) {
    auto j = nlohmann::json::array();
    for (const auto& row : q) {
        auto r = nlohmann::json::array();
        for (const auto& v : row)
            r.push_back(v.to_string());
        j.push_back(std::move(r));
    }
    return j;
}

} // namespace markcalc
