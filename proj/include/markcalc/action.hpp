#pragma once

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace markcalc {

inline constexpr std::string_view kTauName = "tau";

/// True for identifiers of the form [a-z][a-zA-Z0-9_]* that are not reserved.
inline bool is_visible_identifier(std::string_view s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z')
        return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok)
            return false;
    }
    return s != "tau" && s != "nil" && s != "rec";
}

/// Action name: the internal action tau or a visible name.
class ActionName {
public:
    ActionName() : id_(kTauName) {}

    static ActionName tau() { return ActionName{}; }

    static ActionName visible(std::string id) {
        if (!is_visible_identifier(id))
            throw std::invalid_argument("not a visible action name: '" + id + "'");
        ActionName a;
        a.id_ = std::move(id);
        return a;
    }

    bool is_tau() const { return id_ == kTauName; }
    bool is_visible() const { return !is_tau(); }
    const std::string& str() const { return id_; }

    friend bool operator==(const ActionName&, const ActionName&) = default;
    friend auto operator<=>(const ActionName&, const ActionName&) = default;

private:
    std::string id_;
};

/// Set of visible names, used for synchronization and hiding sets.
using NameSet = std::set<std::string>;

inline bool contains(const NameSet& s, const ActionName& a) {
    return a.is_visible() && s.count(a.str()) != 0;
}

/// Finite visible-to-visible renaming; identity outside its domain, never touches tau.
class Relabeling {
public:
    Relabeling() = default;

    /// Throws std::invalid_argument if a pair mentions a non-visible name.
    void add(const std::string& from, const std::string& to) {
        if (!is_visible_identifier(from) || !is_visible_identifier(to))
            throw std::invalid_argument("relabeling must map visible names to visible names");
        if (!map_.emplace(from, to).second)
            throw std::invalid_argument("relabeling maps '" + from + "' twice");
    }

    ActionName apply(const ActionName& a) const {
        if (a.is_tau())
            return a;
        auto it = map_.find(a.str());
        return it == map_.end() ? a : ActionName::visible(it->second);
    }

    const std::map<std::string, std::string>& pairs() const { return map_; }
    bool empty() const { return map_.empty(); }

    friend bool operator==(const Relabeling&, const Relabeling&) = default;
    friend auto operator<=>(const Relabeling&, const Relabeling&) = default;

private:
    std::map<std::string, std::string> map_;
};

} // namespace markcalc

template <>
struct std::hash<markcalc::ActionName> {
    std::size_t operator()(const markcalc::ActionName& a) const noexcept {
        return std::hash<std::string>{}(a.str());
    }
};
