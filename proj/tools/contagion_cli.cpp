// Command-line runner: one experiment per invocation, driven by a JSON config
// with flag overrides.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/json_io.hpp"
#include "contagion/rng.hpp"

namespace fs = std::filesystem;
using namespace contagion;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCap = 2;
constexpr int kExitVerification = 3;

struct Resolved {
    Json config;
    fs::path base_dir;  // relative paths in the config resolve against this
};

std::string read_file(const fs::path& p, const std::string& field) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError(field, "cannot read file '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("out", "cannot write '" + p.string() + "'");
    out << text;
}

// "--a.b=v" and "--a.b v"; values parse as JSON when they can, else as strings.
void apply_overrides(Json& cfg, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string a = extras[i];
        if (a.rfind("--", 0) != 0) throw ValidationError(a, "unexpected argument");
        a = a.substr(2);
        std::string key, value;
        auto eq = a.find('=');
        if (eq != std::string::npos) {
            key = a.substr(0, eq);
            value = a.substr(eq + 1);
        } else {
            key = a;
            if (i + 1 >= extras.size()) throw ValidationError(key, "override needs a value");
            value = extras[++i];
        }
        Json v;
        try {
            v = Json::parse(value);
        } catch (const nlohmann::json::parse_error&) {
            v = value;
        }
        Json* node = &cfg;
        std::stringstream ks(key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ks, part, '.')) parts.push_back(part);
        if (parts.empty()) throw ValidationError(key, "empty override key");
        for (std::size_t p = 0; p + 1 < parts.size(); ++p) {
            Json& next = (*node)[parts[p]];
            if (!next.is_object()) next = Json::object();
            node = &next;
        }
        (*node)[parts.back()] = v;
    }
}

int get_int(const Json& j, const char* key, int dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) throw ValidationError(where + "." + key, "must be an integer");
    return j[key].get<int>();
}

double get_num(const Json& j, const char* key, double dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ValidationError(where + "." + key, "must be a number");
    return j[key].get<double>();
}

bool get_bool(const Json& j, const char* key, bool dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_boolean()) throw ValidationError(where + "." + key, "must be boolean");
    return j[key].get<bool>();
}

std::uint64_t master_seed(const Json& cfg) {
    if (!cfg.contains("master_seed")) return 1;
    if (!cfg["master_seed"].is_number_unsigned() && !cfg["master_seed"].is_number_integer())
        throw ValidationError("master_seed", "must be a nonnegative integer");
    return cfg["master_seed"].get<std::uint64_t>();
}

std::int64_t n_trials(const Json& cfg) {
    if (!cfg.contains("n_trials")) return kDefaultTrials;
    if (!cfg["n_trials"].is_number_integer() || cfg["n_trials"].get<std::int64_t>() < 1)
        throw ValidationError("n_trials", "must be a positive integer");
    return cfg["n_trials"].get<std::int64_t>();
}

// Worker count; kept out of the embedded config because results do not
// depend on it.
int g_threads = 0;
int threads(const Json&) { return g_threads; }

GadgetSpec build_gadget(const Json& cfg) {
    const Json& g = cfg.at("gadget");
    if (!g.is_object()) throw ValidationError("gadget", "must be an object");
    if (!g.contains("kind") || !g["kind"].is_string()) throw ValidationError("gadget.kind", "missing or not a string");
    std::string kind = g["kind"].get<std::string>();
    const std::string w = "gadget";
    auto need_int = [&](const char* k) {
        if (!g.contains(k)) throw ValidationError(w + "." + k, "missing");
        return get_int(g, k, 0, w);
    };
    auto need_num = [&](const char* k) {
        if (!g.contains(k)) throw ValidationError(w + "." + k, "missing");
        return get_num(g, k, 0, w);
    };
    if (kind == "influencer_components") {
        if (!g.contains("sizes") || !g["sizes"].is_array()) throw ValidationError("gadget.sizes", "missing or not an array");
        std::vector<int> sizes;
        for (const auto& s : g["sizes"]) {
            if (!s.is_number_integer()) throw ValidationError("gadget.sizes", "must hold integers");
            sizes.push_back(s.get<int>());
        }
        AdoptionFunction dyn = cfg.contains("dynamics") ? dynamics_from_json(cfg["dynamics"])
                                                        : AdoptionFunction::from_switch_select(
                                                              SwitchingFunction::power(1.0), SelectionFunction::linear());
        const Json& b = cfg.contains("budgets") ? cfg["budgets"] : Json::object();
        return influencer_components(sizes, need_int("hubs"), get_int(b, "red", 1, "budgets"),
                                     get_int(b, "blue", 1, "budgets"), dyn);
    }
    if (kind == "threshold_two_layer")
        return threshold_two_layer(need_int("m"), need_int("n1"), need_int("n2"), need_num("alpha_star"));
    if (kind == "convexity_amplifier")
        return convexity_amplifier(need_int("l1"), need_int("N"), need_num("r"), need_int("lN1"), get_int(g, "lN2", 0, w),
                                   get_int(g, "k", 1, w));
    if (kind == "polarization_amplifier")
        return polarization_amplifier(need_int("k"), need_int("n"), need_int("n1"), need_num("s"));
    if (kind == "chain_replication")
        return chain_replication(need_int("K"), need_int("M"), need_int("Nterm"), get_int(g, "L", 1, w));
    throw ValidationError("gadget.kind", "unknown gadget '" + kind + "'");
}

GameSpec build_game(const Resolved& r) {
    const Json& cfg = r.config;
    GameSpec game;
    if (!cfg.contains("graph")) throw ValidationError("graph", "missing (give a path, an inline graph or a gadget)");
    const Json& g = cfg["graph"];
    if (g.is_string() || (g.is_object() && g.contains("path"))) {
        std::string p = g.is_string() ? g.get<std::string>() : g["path"].get<std::string>();
        fs::path path = fs::path(p).is_absolute() ? fs::path(p) : r.base_dir / p;
        game.graph = std::make_shared<Graph>(graph_from_json(Json::parse(read_file(path, "graph.path")), "graph"));
    } else {
        game.graph = std::make_shared<Graph>(graph_from_json(g, "graph"));
    }
    if (!cfg.contains("dynamics")) throw ValidationError("dynamics", "missing");
    game.dyn = dynamics_from_json(cfg["dynamics"]);
    if (cfg.contains("schedule"))
        game.schedule = schedule_from_json(cfg["schedule"]);
    else
        game.schedule = ParallelRounds{std::max(1, game.graph->n()), false};
    validate_schedule(*game.graph, game.schedule);
    const Json& b = cfg.contains("budgets") ? cfg["budgets"] : Json::object();
    game.K_R = get_int(b, "red", 1, "budgets");
    game.K_B = get_int(b, "blue", 1, "budgets");
    if (game.K_R < 0 || game.K_B < 0) throw ValidationError("budgets", "must be nonnegative");
    return game;
}

std::string oracle_choice(const Json& cfg) {
    std::string o = cfg.contains("oracle") ? cfg["oracle"].get<std::string>() : "auto";
    if (o != "auto" && o != "exact" && o != "monte_carlo" && o != "layered")
        throw ValidationError("oracle", "must be auto, exact, layered or monte_carlo");
    return o;
}

struct Outputs {
    Json result;
    std::string csv;
    int exit_code = kExitOk;
    std::vector<std::pair<std::string, std::string>> extra_files;
};

// Either an explicit game or a layered gadget, as a view for searches.
struct Problem {
    std::optional<GameSpec> game;
    std::optional<GadgetSpec> gadget;
};

Problem build_problem(const Resolved& r) {
    Problem p;
    if (r.config.contains("gadget")) {
        p.gadget = build_gadget(r.config);
        if (p.gadget->game) p.game = p.gadget->game;
    } else {
        p.game = build_game(r);
    }
    return p;
}

int problem_n(const Problem& p) { return p.game ? p.game->graph->n() : p.gadget->n(); }

GameView make_problem_view(const Problem& p, const Json& cfg, bool force_mc) {
    std::string o = oracle_choice(cfg);
    const Json& s = cfg.contains("search") ? cfg["search"] : Json::object();
    bool sym = get_bool(s, "symmetry", true, "search");
    GameView v;
    if (!p.game) {
        if (o == "exact" || o == "monte_carlo")
            throw ValidationError("oracle", "layered gadgets use the layered oracle");
        v = make_view(*p.gadget->layered);
    } else {
        if (o == "layered") throw ValidationError("oracle", "layered oracle needs a layered gadget");
        std::shared_ptr<const PayoffOracle> oracle;
        if (o == "monte_carlo" || force_mc)
            oracle = std::make_shared<MonteCarloOracle>(*p.game, n_trials(cfg), master_seed(cfg), threads(cfg));
        else
            oracle = std::make_shared<ExactOracle>(*p.game);
        v = make_view(*p.game, oracle, sym);
    }
    if (s.contains("cap")) v.cap = s["cap"].get<std::uint64_t>();
    if (s.contains("eps")) v.eps = get_num(s, "eps", v.eps, "search");
    return v;
}

void require_search_config(const Json& cfg) {
    if (cfg.contains("profile")) throw ValidationError("profile", "search verbs take a search directive, not a profile");
}

StrategyProfile need_profile(const Json& cfg, int n) {
    if (cfg.contains("search")) throw ValidationError("search", "this verb takes a profile, not a search directive");
    if (!cfg.contains("profile")) throw ValidationError("profile", "missing");
    return profile_from_json(cfg["profile"], n);
}

// Budget checks name fields relative to the profile object.
void check_profile(const StrategyProfile& prof, int n, int K_R, int K_B) {
    try {
        validate_profile(prof, n, K_R, K_B);
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        if (!e.field().empty()) msg = msg.substr(e.field().size() + 2);
        throw ValidationError("profile." + e.field(), msg);
    }
}

const Allocation& sample(const MixedStrategy& m, Rng& rng) {
    if (m.is_pure()) return m.pure_allocation();
    double u = rng.uniform(), acc = 0.0;
    for (const auto& [p, a] : m.support) {
        acc += p;
        if (u < acc) return a;
    }
    return m.support.back().second;
}

Outputs verb_simulate(const Resolved& r) {
    Problem p = build_problem(r);
    auto game = p.game ? *p.game : p.gadget->explicit_game().value();
    auto prof = r.config.contains("profile") || !p.gadget ? need_profile(r.config, game.graph->n())
                                                         : StrategyProfile::pure(p.gadget->red, p.gadget->blue);
    check_profile(prof, game.graph->n(), game.K_R, game.K_B);
    Rng rng(derive_seed(master_seed(r.config), 0));
    const Allocation& red = sample(prof.red, rng);
    const Allocation& blue = sample(prof.blue, rng);
    StateVector init = resolve_contested_seeds(red, blue, rng);
    RunOptions ro;
    ro.record_trace = get_bool(r.config, "record_trace", false, "");
    auto out = run_contagion(*game.graph, init, game.dyn, game.schedule, rng.next(), ro);
    Outputs o;
    o.result["chi_R"] = out.chi_R;
    o.result["chi_B"] = out.chi_B;
    std::string st;
    for (auto s : out.state) st += s == VState::U ? 'U' : s == VState::R ? 'R' : 'B';
    o.result["state"] = st;
    if (ro.record_trace) {
        Json tr = Json::array();
        for (const auto& e : out.trace) tr.push_back({e.step, e.vertex, e.to == VState::R ? "R" : "B"});
        o.result["trace"] = tr;
    }
    o.csv = "vertex,state\n";
    for (std::size_t v = 0; v < st.size(); ++v) o.csv += std::to_string(v) + "," + st[v] + "\n";
    return o;
}

Outputs verb_payoff(const Resolved& r) {
    Problem p = build_problem(r);
    int n = problem_n(p);
    auto prof = r.config.contains("profile") || !p.gadget ? need_profile(r.config, n)
                                                         : StrategyProfile::pure(p.gadget->red, p.gadget->blue);
    std::string o = oracle_choice(r.config);
    if (p.game)
        check_profile(prof, n, p.game->K_R, p.game->K_B);
    else
        check_profile(prof, n, p.gadget->K_R, p.gadget->K_B);
    PayoffEstimate e;
    Json caveats = Json::array();
    if (!p.game) {
        if (o == "exact" || o == "monte_carlo") throw ValidationError("oracle", "layered gadgets use the layered oracle");
        e = layered_exact_payoffs(*p.gadget->layered, prof);
    } else if (o == "monte_carlo") {
        e = estimate_payoffs(*p.game, prof, n_trials(r.config), master_seed(r.config), threads(r.config));
    } else if (o == "layered") {
        throw ValidationError("oracle", "layered oracle needs a layered gadget");
    } else {
        try {
            e = exact_payoffs(*p.game, prof);
        } catch (const CapExceeded& ex) {
            if (o == "exact") throw;
            caveats.push_back(std::string("exact oracle exceeded its budget (") + ex.what() + "); Monte Carlo used");
            e = estimate_payoffs(*p.game, prof, n_trials(r.config), master_seed(r.config), threads(r.config));
        }
    }
    Outputs out;
    out.result = payoff_to_json(e);
    out.result["joint"] = e.joint();
    out.result["caveats"] = caveats;
    out.csv = payoff_csv_header() + payoff_csv_row(e);
    return out;
}

// Runs a search with the exact oracle, falling back to Monte Carlo under
// "auto" when the exact budget is exhausted.
template <class F>
Json with_fallback(const Resolved& r, const Problem& p, F&& run) {
    std::string o = oracle_choice(r.config);
    try {
        return run(make_problem_view(p, r.config, false));
    } catch (const CapExceeded& ex) {
        if (o != "auto" || !p.game) throw;
        Json j = run(make_problem_view(p, r.config, true));
        j["caveats"].push_back(std::string("exact oracle exceeded its budget (") + ex.what() + "); Monte Carlo used");
        return j;
    }
}

MaxJointMode max_joint_mode(const Json& cfg) {
    const Json& s = cfg.contains("search") ? cfg["search"] : Json::object();
    std::string m = s.contains("max_joint") ? s["max_joint"].get<std::string>() : "exhaustive";
    if (m == "exhaustive") return MaxJointMode::Exhaustive;
    if (m == "hill_climb") return MaxJointMode::HillClimb;
    throw ValidationError("search.max_joint", "must be exhaustive or hill_climb");
}

Outputs verb_search(const Resolved& r, const std::string& verb) {
    require_search_config(r.config);
    Problem p = build_problem(r);
    std::string csv;
    Json res = with_fallback(r, p, [&](const GameView& v) {
        if (verb == "nash") {
            auto rep = find_pure_nash(v);
            csv = equilibria_csv(rep);
            Json j = nash_to_json(rep);
            j["caveats"] = Json::array();
            if (rep.statistical) j["caveats"].push_back("payoffs are Monte Carlo estimates; equilibrium status is statistical");
            return j;
        }
        auto rep = verb == "poa" ? price_of_anarchy(v, max_joint_mode(r.config)) : budget_multiplier(v);
        csv = equilibria_csv(rep.nash, rep.has_pure_nash ? rep.worst_index : SIZE_MAX,
                             rep.has_pure_nash ? (verb == "bm" ? rep.bm_index : rep.best_index) : SIZE_MAX);
        return efficiency_to_json(rep);
    });
    Outputs o;
    o.result = res;
    o.csv = csv;
    return o;
}

Outputs verb_gadget(const Resolved& r) {
    if (!r.config.contains("gadget")) throw ValidationError("gadget", "missing");
    GadgetSpec g = build_gadget(r.config);
    const Json& vj = r.config["gadget"].contains("verify") ? r.config["gadget"]["verify"] : Json::object();
    VerifyOptions vo;
    vo.monte_carlo = get_bool(vj, "monte_carlo", false, "gadget.verify");
    vo.trials = r.config.contains("n_trials") ? n_trials(r.config) : 10000;
    vo.seed = master_seed(r.config);
    vo.threads = threads(r.config);
    vo.exhaustive = get_bool(vj, "exhaustive", true, "gadget.verify");
    auto rep = verify_gadget(g, vo);
    Outputs o;
    o.result = verification_to_json(rep);
    o.csv = verification_csv(rep);
    o.exit_code = rep.passed ? kExitOk : kExitVerification;
    Json graph;
    if (g.game) {
        graph = graph_to_json(*g.game->graph);
    } else if (auto m = g.layered->materialize(5'000'000)) {
        graph = graph_to_json(*m->graph);
    } else {
        graph["layered"] = g.layered->components;
        graph["n"] = g.n();
        graph["edge_count"] = g.layered->edge_count();
        graph["note"] = "complete bipartite stages between consecutive layers; too large to list edges";
    }
    Json prof = profile_to_json(StrategyProfile::pure(g.red, g.blue));
    o.extra_files.emplace_back("graph.json", graph.dump() + "\n");
    o.extra_files.emplace_back("profile.json", prof.dump(2) + "\n");
    o.extra_files.emplace_back("predictions.json", predictions_to_json(g).dump(2) + "\n");
    return o;
}

Outputs verb_couple_test(const Resolved& r) {
    const Json& c = r.config.contains("couple_test") ? r.config["couple_test"] : Json::object();
    CoupleTestConfig cfg;
    if (c.contains("mode")) {
        if (!c["mode"].is_string()) throw ValidationError("couple_test.mode", "must be a string");
        try {
            cfg.mode = parse_couple_mode(c["mode"].get<std::string>());
        } catch (const ValidationError&) {
            throw ValidationError("couple_test.mode", "must be lemma1, lemma2 or lemma3");
        }
    }
    cfg.runs = c.contains("runs") ? c["runs"].get<std::int64_t>() : 10000;
    if (cfg.runs < 1) throw ValidationError("couple_test.runs", "must be positive");
    cfg.instances = get_int(c, "instances", cfg.instances, "couple_test");
    cfg.exact_instances = get_int(c, "exact_instances", cfg.exact_instances, "couple_test");
    cfg.seed = master_seed(r.config);
    cfg.threads = threads(r.config);
    auto rep = couple_test(cfg);
    Outputs o;
    o.result = couple_report_to_json(rep);
    o.csv = couple_report_csv(rep);
    o.exit_code = rep.passed ? kExitOk : kExitVerification;
    return o;
}

int run(const std::string& verb, Resolved& r, const fs::path& out_dir) {
    Outputs o;
    if (verb == "simulate")
        o = verb_simulate(r);
    else if (verb == "payoff")
        o = verb_payoff(r);
    else if (verb == "nash" || verb == "poa" || verb == "bm")
        o = verb_search(r, verb);
    else if (verb == "gadget")
        o = verb_gadget(r);
    else if (verb == "couple-test")
        o = verb_couple_test(r);
    else
        throw ValidationError("verb", "unknown verb '" + verb + "'");
    fs::create_directories(out_dir);
    Json doc;
    doc["verb"] = verb;
    doc["config"] = r.config;
    doc["result"] = o.result;
    write_file(out_dir / "result.json", doc.dump(2) + "\n");
    write_file(out_dir / "result.csv", o.csv);
    for (const auto& [name, text] : o.extra_files) write_file(out_dir / name, text);
    return o.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Competitive contagion games: simulation, payoffs, equilibria and gadgets"};
    app.allow_extras();
    std::string verb, config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    std::optional<int> nthreads;
    app.add_option("verb", verb, "simulate | payoff | nash | poa | bm | gadget | couple-test")->required();
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "Monte Carlo replications");
    app.add_option("--threads", nthreads, "worker threads (results do not depend on it)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }
    try {
        Resolved r;
        r.config = Json::object();
        if (!config_path.empty()) {
            try {
                r.config = Json::parse(read_file(config_path, "config"));
            } catch (const nlohmann::json::parse_error& e) {
                throw ValidationError("config", std::string("not valid JSON: ") + e.what());
            }
            if (!r.config.is_object()) throw ValidationError("config", "must be a JSON object");
            r.base_dir = fs::path(config_path).parent_path();
        }
        apply_overrides(r.config, app.remaining());
        if (seed) r.config["master_seed"] = *seed;
        if (trials) r.config["n_trials"] = *trials;
        if (nthreads) r.config["threads"] = *nthreads;
        g_threads = get_int(r.config, "threads", 0, "");
        if (g_threads < 0) throw ValidationError("threads", "must be nonnegative");
        r.config.erase("threads");
        int rc = run(verb, r, out_dir);
        return rc;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
