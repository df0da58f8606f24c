#pragma once

// Command-line front end. run_cli() is kept separate from main() so the
// test suite can drive every subcommand in-process.

#include "markcalc/markcalc.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace markcalc::cli {

enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kInequivalent = 2,
    kInconclusive = 3,
    kClassViolation = 4,
};

struct Io {
    std::ostream& out;
    std::ostream& err;
};

inline std::size_t default_max_states() {
    if (const char* env = std::getenv("MARKCALC_MAX_STATES")) {
        try {
            const auto v = std::stoull(env);
            if (v > 0)
                return v;
        } catch (const std::exception&) {
        }
    }
    return kDefaultMaxStates;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliFailure {
    int code;
    std::string message;
};

template <Calculus C>
ParseResult<C> load(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_with_spans<C>(text);
    } catch (const ParseError& e) {
        throw CliFailure{kError, path + ":" + std::to_string(e.span().start) + "-" + std::to_string(e.span().end) +
                                     ": " + e.what()};
    }
}

template <Calculus C>
ParseResult<C> load_checked(const std::string& path) {
    auto parsed = load<C>(path);
    auto report = check_well_formed(parsed.term);
    if (!report.ok()) {
        std::string msg = path + ": term is not closed and guarded:";
        for (const auto& v : report.violations) {
            msg += "\n  " + v.message();
            if (auto it = parsed.spans.find(v.node); it != parsed.spans.end())
                msg += " (bytes " + std::to_string(it->second.start) + "-" + std::to_string(it->second.end) + ")";
        }
        throw CliFailure{kError, msg};
    }
    return parsed;
}

template <Calculus C>
Term<C> load_well_formed(const std::string& path) {
    return load_checked<C>(path).term;
}

inline std::string otimes_header(const RateComposer& otimes) { return "# otimes: " + otimes.name; }

// ---------------------------------------------------------------------------

inline int cmd_parse(const std::string& calculus, const std::string& file, Io io) {
    auto show = [&](auto parsed) {
        io.out << print(parsed.term) << "\n";
        for (const auto& v : check_well_formed(parsed.term).violations)
            io.err << file << ": warning: " << v.message() << "\n";
    };
    if (calculus == "it")
        show(load<It>(file));
    else
        show(load<Ot>(file));
    return kOk;
}

inline int cmd_lts(const std::string& calculus, const std::string& otimes_name, std::size_t max_states,
                   const std::string& format, const std::string& file, Io io) {
    auto emit = [&](const auto& m) {
        auto printer = [](const auto& t) { return print(t); };
        if (format == "dot")
            io.out << export_dot(m, printer);
        else
            io.out << export_json(m, printer) << "\n";
        if (m.truncated()) {
            io.err << file << ": exploration stopped at " << max_states << " states (truncated)\n";
            return int(kInconclusive);
        }
        return int(kOk);
    };
    if (calculus == "it") {
        const auto otimes = RateComposer::by_name(otimes_name);
        io.err << otimes_header(otimes) << "\n";
        return emit(build_it(load_well_formed<It>(file), otimes, max_states));
    }
    return emit(build_ot(load_well_formed<Ot>(file), max_states));
}

struct PairOutcome {
    int code = kOk;
    std::string text;
};

inline PairOutcome bisim_pair(const std::string& calculus, const CheckOptions& opt, const std::string& f1,
                              const std::string& f2) {
    Verdict v;
    if (calculus == "it")
        v = equivalent(load_well_formed<It>(f1), load_well_formed<It>(f2), opt);
    else
        v = equivalent(load_well_formed<Ot>(f1), load_well_formed<Ot>(f2), opt);
    PairOutcome o;
    o.text = to_string(v.kind);
    if (v.kind == Verdict::Kind::Inequivalent) {
        o.code = kInequivalent;
        if (v.evidence)
            o.text += "\nevidence: round " + std::to_string(v.evidence->round) + ": " + v.evidence->detail;
    } else if (v.kind == Verdict::Kind::Inconclusive) {
        o.code = kInconclusive;
        o.text += "\nstate space truncated at " + std::to_string(opt.max_states) + " states";
    }
    return o;
}

inline PairOutcome preservation_pair(OtVariant variant, const CheckOptions& opt, const std::string& f1,
                                     const std::string& f2) {
    std::vector<ItTerm> terms;
    std::vector<OtTerm> encoded;
    for (const auto& f : {f1, f2}) {
        auto parsed = load_checked<It>(f);
        if (auto err = class_violation(parsed.term, variant)) {
            std::string where;
            if (auto it = parsed.spans.find(err->offending().id()); it != parsed.spans.end())
                where = ":" + std::to_string(it->second.start) + "-" + std::to_string(it->second.end);
            throw CliFailure{kClassViolation, f + where + ": " + err->what()};
        }
        terms.push_back(parsed.term);
        encoded.push_back(translate(parsed.term, variant));
    }
    const auto it_verdict = equivalent(terms[0], terms[1], opt);
    const auto ot_verdict = equivalent(encoded[0], encoded[1], opt);
    PairOutcome o;
    o.text = std::string("IT: ") + to_string(it_verdict.kind) + "; OT(" + to_string(variant) +
             "): " + to_string(ot_verdict.kind) + "; theorem instance ";
    if (it_verdict.kind == Verdict::Kind::Inconclusive || ot_verdict.kind == Verdict::Kind::Inconclusive) {
        o.code = kInconclusive;
        o.text += "UNDECIDED";
    } else if (it_verdict.equivalent() == ot_verdict.equivalent()) {
        o.text += "HOLDS";
    } else {
        o.code = kInequivalent;
        o.text += "VIOLATED";
    }
    return o;
}

inline std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& listfile) {
    std::istringstream in(read_file(listfile));
    const auto base = std::filesystem::path(listfile).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return (fp.is_absolute() ? fp : base / fp).string();
    };
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a))
            continue;
        if (!(ls >> b) || (ls >> extra))
            throw CliFailure{kError, listfile + ": each line must name exactly two files"};
        out.emplace_back(resolve(a), resolve(b));
    }
    return out;
}

// Runs each pair on its own task; output keeps list order.
template <class F>
int run_batch(const std::string& listfile, F&& check, Io io) {
    const auto pairs = read_pairs(listfile);
    std::vector<std::future<PairOutcome>> jobs;
    for (const auto& [a, b] : pairs)
        jobs.push_back(std::async(std::launch::async, [&check, a = a, b = b] {
            try {
                return check(a, b);
            } catch (const CliFailure& f) {
                return PairOutcome{f.code, "error: " + f.message};
            } catch (const std::exception& e) {
                return PairOutcome{kError, std::string("error: ") + e.what()};
            }
        }));
    int worst = kOk;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto o = jobs[i].get();
        io.out << pairs[i].first << " " << pairs[i].second << ": " << o.text << "\n";
        if (o.code == kError || o.code == kClassViolation)
            worst = std::max(worst, 10 + o.code); // rank errors above verdicts
        else
            worst = std::max(worst, o.code == kInequivalent ? 1 : o.code == kInconclusive ? 2 : 0);
    }
    switch (worst) {
    case 0: return kOk;
    case 1: return kInequivalent;
    case 2: return kInconclusive;
    default: return worst - 10;
    }
}

inline int cmd_encode(const std::string& variant_name, const std::string& file, Io io) {
    const OtVariant v = ot_variant_from_string(variant_name);
    auto parsed = load_checked<It>(file);
    if (auto err = class_violation(parsed.term, v)) {
        std::string where;
        if (auto it = parsed.spans.find(err->offending().id()); it != parsed.spans.end())
            where = ":" + std::to_string(it->second.start) + "-" + std::to_string(it->second.end);
        io.err << file << where << ": " << err->what() << "\n";
        return kClassViolation;
    }
    io.out << print(translate(parsed.term, v)) << "\n";
    return kOk;
}

inline int cmd_classify(const std::string& calculus, std::size_t max_states, const std::string& file, Io io) {
    nlohmann::json j;
    j["calculus"] = calculus;
    TermClass c;
    if (calculus == "it")
        c = classify_it(load_well_formed<It>(file));
    else
        c = classify_ot(load_well_formed<Ot>(file), max_states);
    j["itSequential"] = c.sequential;
    j["itSyncFree"] = c.sync_free;
    j["otNoNondet"] = c.no_nondet ? nlohmann::json(*c.no_nondet) : nlohmann::json(nullptr);
    j["otControlledNondet"] = c.controlled_nondet ? nlohmann::json(*c.controlled_nondet) : nlohmann::json(nullptr);
    io.out << j.dump(2) << "\n";
    return kOk;
}

inline int cmd_ctmc(const std::string& calculus, const std::string& otimes_name, std::size_t max_states,
                    const std::string& file, Io io) {
    auto emit = [&](const auto& m) {
        if (m.truncated()) {
            io.err << file << ": exploration stopped at " << max_states << " states (truncated)\n";
            return int(kInconclusive);
        }
        nlohmann::json j;
        j["states"] = nlohmann::json::array();
        for (const auto& s : m.states())
            j["states"].push_back(print(s));
        try {
            j["matrix"] = rate_matrix_to_json(extract_ctmc(m));
        } catch (const NotMarkovian& e) {
            io.err << file << ": " << e.what() << "\n";
            return int(kError);
        }
        io.out << j.dump(2) << "\n";
        return int(kOk);
    };
    if (calculus == "it") {
        const auto otimes = RateComposer::by_name(otimes_name);
        io.err << otimes_header(otimes) << "\n";
        return emit(build_it(load_well_formed<It>(file), otimes, max_states));
    }
    return emit(build_ot(load_well_formed<Ot>(file), max_states));
}

// ---------------------------------------------------------------------------

inline int run_cli(std::vector<std::string> args, Io io) {
    CLI::App app{"markcalc: integrated-time / orthogonal-time Markovian process calculus workbench"};
    app.require_subcommand(1);

    std::string calculus = "it", otimes = "product", format = "dot", variant;
    std::size_t max_states = default_max_states();
    std::vector<std::string> files;
    std::string pairs;

    auto calculus_opt = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--calculus", calculus, "it or ot")->check(CLI::IsMember({"it", "ot"}));
        if (required)
            o->required();
    };
    auto otimes_opt = [&](CLI::App* sub) {
        sub->add_option("--otimes", otimes, "rate composer for synchronizations")
            ->check(CLI::IsMember({"product", "min", "sum"}));
    };
    auto bound_opt = [&](CLI::App* sub) {
        sub->add_option("--max-states", max_states, "state exploration bound")->check(CLI::PositiveNumber);
    };

    auto* parse_cmd = app.add_subcommand("parse", "print the canonical form of a term");
    calculus_opt(parse_cmd, true);
    parse_cmd->add_option("FILE", files)->required()->expected(1);

    auto* lts_cmd = app.add_subcommand("lts", "print the multitransition system of a term");
    calculus_opt(lts_cmd, true);
    otimes_opt(lts_cmd);
    bound_opt(lts_cmd);
    lts_cmd->add_option("--format", format)->check(CLI::IsMember({"dot", "json"}));
    lts_cmd->add_option("FILE", files)->required()->expected(1);

    auto* bisim_cmd = app.add_subcommand("bisim", "decide Markovian bisimilarity of two terms");
    calculus_opt(bisim_cmd, true);
    otimes_opt(bisim_cmd);
    bound_opt(bisim_cmd);
    bisim_cmd->add_option("--variant", variant, "eager, lazy or mp (OT only)")
        ->check(CLI::IsMember({"eager", "lazy", "mp"}));
    bisim_cmd->add_option("--pairs", pairs, "file listing one pair of term files per line");
    bisim_cmd->add_option("FILES", files)->expected(0, 2);

    auto* encode_cmd = app.add_subcommand("encode", "translate an IT term into OT");
    encode_cmd->add_option("--variant", variant)->required()->check(CLI::IsMember({"eager", "lazy", "mp"}));
    encode_cmd->add_option("FILE", files)->required()->expected(1);

    auto* classify_cmd = app.add_subcommand("classify", "report the syntactic classes of a term");
    calculus_opt(classify_cmd, true);
    bound_opt(classify_cmd);
    classify_cmd->add_option("FILE", files)->required()->expected(1);

    auto* preserve_cmd =
        app.add_subcommand("check-preservation", "check one instance of the equivalence-preservation theorem");
    preserve_cmd->add_option("--variant", variant)->required()->check(CLI::IsMember({"eager", "lazy", "mp"}));
    otimes_opt(preserve_cmd);
    bound_opt(preserve_cmd);
    preserve_cmd->add_option("--pairs", pairs, "file listing one pair of IT term files per line");
    preserve_cmd->add_option("FILES", files)->expected(0, 2);

    auto* ctmc_cmd = app.add_subcommand("ctmc", "print the rate matrix of a term as JSON");
    calculus_opt(ctmc_cmd, false);
    otimes_opt(ctmc_cmd);
    bound_opt(ctmc_cmd);
    ctmc_cmd->add_option("FILE", files)->required()->expected(1);

    std::vector<std::string> argv_store{"markcalc"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, io.out, io.err) == 0 ? kOk : kError;
    }

    try {
        if (parse_cmd->parsed())
            return cmd_parse(calculus, files[0], io);
        if (lts_cmd->parsed())
            return cmd_lts(calculus, otimes, max_states, format, files[0], io);
        if (encode_cmd->parsed())
            return cmd_encode(variant, files[0], io);
        if (classify_cmd->parsed())
            return cmd_classify(calculus, max_states, files[0], io);
        if (ctmc_cmd->parsed())
            return cmd_ctmc(calculus, otimes, max_states, files[0], io);

        const bool is_bisim = bisim_cmd->parsed();
        if (pairs.empty() && files.size() != 2) {
            io.err << "expected two term files or --pairs LISTFILE\n";
            return kError;
        }
        CheckOptions opt;
        opt.otimes = RateComposer::by_name(otimes);
        opt.max_states = max_states;
        if (is_bisim) {
            if (calculus == "ot") {
                if (variant.empty()) {
                    io.err << "--variant is required for --calculus ot\n";
                    return kError;
                }
                opt.variant = ot_variant_from_string(variant);
                io.out << "# calculus: ot, variant: " << variant << "\n";
            } else {
                io.out << otimes_header(opt.otimes) << "\n";
            }
            auto check = [&](const std::string& a, const std::string& b) { return bisim_pair(calculus, opt, a, b); };
            if (!pairs.empty())
                return run_batch(pairs, check, io);
            auto o = check(files[0], files[1]);
            io.out << o.text << "\n";
            return o.code;
        }
        opt.variant = ot_variant_from_string(variant);
        io.out << otimes_header(opt.otimes) << "\n";
        auto check = [&](const std::string& a, const std::string& b) {
            return preservation_pair(opt.variant, opt, a, b);
        };
        if (!pairs.empty())
            return run_batch(pairs, check, io);
        auto o = check(files[0], files[1]);
        io.out << o.text << "\n";
        return o.code;
    } catch (const CliFailure& f) {
        io.err << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return kError;
    }
}

} // namespace markcalc::cli
