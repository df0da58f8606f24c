#pragma once

#include "markcalc/action.hpp"
#include "markcalc/rate.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

namespace markcalc {

/// Calculus tags. `It`: actions carry exponential rates. `Ot`: instantaneous
/// actions plus separate exponential delays.
struct It {};
struct Ot {};

template <class C>
concept Calculus = std::is_same_v<C, It> || std::is_same_v<C, Ot>;

enum class Kind : std::uint8_t {
    Nil,
    Prefix,     // <a,r>.P   (It only)
    ActPrefix,  // a.Q       (Ot only)
    TimePrefix, // (r).Q     (Ot only)
    Choice,
    Par,
    Hide,
    Relab,
    Var,
    Rec,
};

inline bool is_prefix_kind(Kind k) {
    return k == Kind::Prefix || k == Kind::ActPrefix || k == Kind::TimePrefix;
}

namespace detail {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Nil;
    ActionName name;
    Rate rate;
    std::string var;
    NameSet names;
    Relabeling relab;
    NodePtr left;  // body for unary operators
    NodePtr right;
    std::size_t hash = 0;
    std::size_t size = 1;
    std::vector<std::string> free_vars; // sorted, unique
};

inline std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline void merge_free(std::vector<std::string>& into, const std::vector<std::string>& from) {
    std::vector<std::string> out;
    out.reserve(into.size() + from.size());
    std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
    into = std::move(out);
}

inline NodePtr finish(Node n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ULL;
    switch (n.kind) {
    case Kind::Nil:
        break;
    case Kind::Prefix:
        h = mix(h, std::hash<std::string>{}(n.name.str()));
        h = mix(h, n.rate.hash());
        break;
    case Kind::ActPrefix:
        h = mix(h, std::hash<std::string>{}(n.name.str()));
        break;
    case Kind::TimePrefix:
        h = mix(h, n.rate.hash());
        break;
    case Kind::Par:
    case Kind::Hide:
        for (const auto& s : n.names)
            h = mix(h, std::hash<std::string>{}(s));
        break;
    case Kind::Relab:
        for (const auto& [from, to] : n.relab.pairs())
            h = mix(mix(h, std::hash<std::string>{}(from)), std::hash<std::string>{}(to));
        break;
    case Kind::Var:
    case Kind::Rec:
        h = mix(h, std::hash<std::string>{}(n.var));
        break;
    case Kind::Choice:
        break;
    }
    if (n.left) {
        h = mix(h, n.left->hash);
        n.size += n.left->size;
        n.free_vars = n.left->free_vars;
    }
    if (n.right) {
        h = mix(h, n.right->hash);
        n.size += n.right->size;
        merge_free(n.free_vars, n.right->free_vars);
    }
    if (n.kind == Kind::Var)
        n.free_vars = {n.var};
    if (n.kind == Kind::Rec) {
        auto it = std::lower_bound(n.free_vars.begin(), n.free_vars.end(), n.var);
        if (it != n.free_vars.end() && *it == n.var)
            n.free_vars.erase(it);
    }
    n.hash = h;
    return std::make_shared<const Node>(std::move(n));
}

inline bool equal(const Node* a, const Node* b) {
    if (a == b)
        return true;
    if (!a || !b || a->hash != b->hash || a->kind != b->kind || a->size != b->size)
        return false;
    if (a->name != b->name || a->rate != b->rate || a->var != b->var || a->names != b->names ||
        a->relab != b->relab)
        return false;
    return equal(a->left.get(), b->left.get()) && equal(a->right.get(), b->right.get());
}

} // namespace detail

/// Immutable process term of calculus C. Copies share structure.
///
/// Equality is syntactic (no alpha-conversion, no structural congruence);
/// hashing is structural and cached per node.
template <Calculus C>
class Term {
public:
    using calculus = C;

    Term() : node_(nil_node()) {}

    static Term nil() { return Term(nil_node()); }

    static Term prefix(ActionName a, Rate r, Term body)
        requires std::is_same_v<C, It>
    {
        require_positive(r);
        detail::Node n;
        n.kind = Kind::Prefix;
        n.name = std::move(a);
        n.rate = r;
        n.left = body.node_;
        return Term(detail::finish(std::move(n)));
    }

    static Term act(ActionName a, Term body)
        requires std::is_same_v<C, Ot>
    {
        detail::Node n;
        n.kind = Kind::ActPrefix;
        n.name = std::move(a);
        n.left = body.node_;
        return Term(detail::finish(std::move(n)));
    }

    static Term delay(Rate r, Term body)
        requires std::is_same_v<C, Ot>
    {
        require_positive(r);
        detail::Node n;
        n.kind = Kind::TimePrefix;
        n.rate = r;
        n.left = body.node_;
        return Term(detail::finish(std::move(n)));
    }

    static Term choice(Term l, Term r) { return binary(Kind::Choice, std::move(l), std::move(r), {}); }

    static Term par(Term l, Term r, NameSet sync) {
        check_visible(sync);
        return binary(Kind::Par, std::move(l), std::move(r), std::move(sync));
    }

    static Term hide(Term body, NameSet h) {
        check_visible(h);
        detail::Node n;
        n.kind = Kind::Hide;
        n.names = std::move(h);
        n.left = body.node_;
        return Term(detail::finish(std::move(n)));
    }

    static Term relabel(Term body, Relabeling phi) {
        detail::Node n;
        n.kind = Kind::Relab;
        n.relab = std::move(phi);
        n.left = body.node_;
        return Term(detail::finish(std::move(n)));
    }

    static Term var(std::string x) {
        detail::Node n;
        n.kind = Kind::Var;
        n.var = std::move(x);
        return Term(detail::finish(std::move(n)));
    }

    static Term rec(std::string x, Term body) {
        detail::Node n;
        n.kind = Kind::Rec;
        n.var = std::move(x);
        n.left = body.node_;
        return Term(detail::finish(std::move(n)));
    }

    Kind kind() const { return node_->kind; }
    const ActionName& name() const { return node_->name; }
    const Rate& rate() const { return node_->rate; }
    const std::string& var_name() const { return node_->var; }
    const NameSet& names() const { return node_->names; }
    const Relabeling& relabeling() const { return node_->relab; }

    /// Body of a unary operator, or the left operand of a binary one.
    Term body() const { return Term(node_->left); }
    Term left() const { return Term(node_->left); }
    Term right() const { return Term(node_->right); }

    std::size_t size() const { return node_->size; }
    std::size_t hash() const { return node_->hash; }
    const std::vector<std::string>& free_variables() const { return node_->free_vars; }
    bool is_closed() const { return node_->free_vars.empty(); }

    bool has_free(const std::string& x) const {
        return std::binary_search(node_->free_vars.begin(), node_->free_vars.end(), x);
    }

    /// Stable identity of this node; used to map subterms back to source spans.
    const void* id() const { return node_.get(); }

    friend bool operator==(const Term& a, const Term& b) { return detail::equal(a.node_.get(), b.node_.get()); }

private:
    explicit Term(detail::NodePtr n) : node_(std::move(n)) {}

    static detail::NodePtr nil_node() {
        static const detail::NodePtr nil = detail::finish(detail::Node{});
        return nil;
    }

    static Term binary(Kind k, Term l, Term r, NameSet names) {
        detail::Node n;
        n.kind = k;
        n.names = std::move(names);
        n.left = l.node_;
        n.right = r.node_;
        return Term(detail::finish(std::move(n)));
    }

    static void require_positive(const Rate& r) {
        if (!r.is_positive())
            throw std::invalid_argument("rate must be positive");
    }

    static void check_visible(const NameSet& s) {
        for (const auto& name : s)
            if (!is_visible_identifier(name))
                throw std::invalid_argument("action visibility violated: '" + name + "' is not a visible name");
    }

    detail::NodePtr node_;
};

using ItTerm = Term<It>;
using OtTerm = Term<Ot>;

/// Rebuilds a node with new children, keeping all other fields.
template <Calculus C>
Term<C> with_children(const Term<C>& t, const Term<C>& l, const Term<C>& r = Term<C>::nil()) {
    switch (t.kind()) {
    case Kind::Prefix:
        if constexpr (std::is_same_v<C, It>)
            return Term<C>::prefix(t.name(), t.rate(), l);
        break;
    case Kind::ActPrefix:
        if constexpr (std::is_same_v<C, Ot>)
            return Term<C>::act(t.name(), l);
        break;
    case Kind::TimePrefix:
        if constexpr (std::is_same_v<C, Ot>)
            return Term<C>::delay(t.rate(), l);
        break;
    case Kind::Choice:
        return Term<C>::choice(l, r);
    case Kind::Par:
        return Term<C>::par(l, r, t.names());
    case Kind::Hide:
        return Term<C>::hide(l, t.names());
    case Kind::Relab:
        return Term<C>::relabel(l, t.relabeling());
    case Kind::Rec:
        return Term<C>::rec(t.var_name(), l);
    case Kind::Nil:
    case Kind::Var:
        return t;
    }
    assert(false && "kind not valid for this calculus");
    return t;
}

inline bool is_binary(Kind k) { return k == Kind::Choice || k == Kind::Par; }
inline bool is_leaf(Kind k) { return k == Kind::Nil || k == Kind::Var; }

/// t{replacement / x}: replaces free occurrences of variable x.
///
/// Capture is not avoided; callers substitute closed terms (the recursion
/// unfolding case), for which capture cannot happen.
template <Calculus C>
Term<C> substitute(const Term<C>& t, const std::string& x, const Term<C>& replacement) {
    if (!t.has_free(x))
        return t;
    switch (t.kind()) {
    case Kind::Var:
        return replacement;
    case Kind::Rec:
        // has_free(x) already excludes a binder named x.
        return Term<C>::rec(t.var_name(), substitute(t.body(), x, replacement));
    default:
        break;
    }
    if (is_binary(t.kind()))
        return with_children(t, substitute(t.left(), x, replacement), substitute(t.right(), x, replacement));
    return with_children(t, substitute(t.body(), x, replacement));
}

/// One unfolding of `rec X : P`, i.e. P{rec X : P / X}.
template <Calculus C>
Term<C> unfold(const Term<C>& rec_term) {
    assert(rec_term.kind() == Kind::Rec);
    return substitute(rec_term.body(), rec_term.var_name(), rec_term);
}

/// Replaces every occurrence of the subterm `target` by the variable `y`.
template <Calculus C>
Term<C> replace_subterm(const Term<C>& t, const Term<C>& target, const std::string& y) {
    if (t == target)
        return Term<C>::var(y);
    if (t.size() <= target.size() || is_leaf(t.kind()))
        return t;
    if (is_binary(t.kind()))
        return with_children(t, replace_subterm(t.left(), target, y), replace_subterm(t.right(), target, y));
    return with_children(t, replace_subterm(t.body(), target, y));
}

/// Pre-order traversal over all subterms, including t itself.
template <Calculus C, class F>
void for_each_subterm(const Term<C>& t, F&& f) {
    f(t);
    if (is_leaf(t.kind()))
        return;
    for_each_subterm(t.left(), f);
    if (is_binary(t.kind()))
        for_each_subterm(t.right(), f);
}

/// Every variable name appearing in t, free or bound.
template <Calculus C>
std::set<std::string> all_variables(const Term<C>& t) {
    std::set<std::string> out;
    for_each_subterm(t, [&](const Term<C>& s) {
        if (s.kind() == Kind::Var || s.kind() == Kind::Rec)
            out.insert(s.var_name());
    });
    return out;
}

} // namespace markcalc

template <markcalc::Calculus C>
struct std::hash<markcalc::Term<C>> {
    std::size_t operator()(const markcalc::Term<C>& t) const noexcept { return t.hash(); }
};
