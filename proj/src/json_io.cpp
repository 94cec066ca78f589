#include "contagion/json_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw MalformedDocument(where + "." + key, "missing");
    return j.at(key);
}

double number(const Json& j, const char* key, const std::string& where) {
    const Json& v = field(j, key, where);
    if (!v.is_number()) throw MalformedDocument(where + "." + key, "must be a number");
    return v.get<double>();
}

std::int64_t integer(const Json& j, const char* key, const std::string& where) {
    const Json& v = field(j, key, where);
    if (!v.is_number_integer()) throw MalformedDocument(where + "." + key, "must be an integer");
    return v.get<std::int64_t>();
}

std::vector<int> int_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw MalformedDocument(where, "must be an array of integers");
    std::vector<int> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number_integer()) throw MalformedDocument(where + "[" + std::to_string(i) + "]", "must be an integer");
        out.push_back(j[i].get<int>());
    }
    return out;
}

Breakpoints points_from(const Json& j, const std::string& where) {
    const Json& p = field(j, "points", where);
    if (!p.is_array()) throw MalformedDocument(where + ".points", "must be an array of [x, y] pairs");
    Breakpoints out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& e = p[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw MalformedDocument(where + ".points[" + std::to_string(i) + "]", "must be an [x, y] pair");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

Json points_to(const Breakpoints& b) {
    Json a = Json::array();
    for (auto [x, y] : b) a.push_back({x, y});
    return a;
}

// Library errors name fields relative to the object; prefix them with the
// enclosing document path.
[[noreturn]] void rethrow_under(const std::string& root, const ValidationError& e) {
    std::string msg = e.what();
    if (!e.field().empty()) msg = msg.substr(e.field().size() + 2);
    throw ValidationError(e.field().empty() ? root : root + "." + e.field(), msg);
}

// Wraps constructor failures so they carry the JSON field name.
template <class F>
auto named(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        // fields from this parser already carry the full path
        if (e.field().rfind(where, 0) == 0) throw;
        auto dot = where.rfind('.');
        if (dot == std::string::npos) throw;
        rethrow_under(where.substr(0, dot), e);
    } catch (const std::exception& e) {
        throw ValidationError(where, e.what());
    }
}

SwitchingFunction switching_from(const Json& j, const std::string& where) {
    if (!j.is_object()) throw MalformedDocument(where, "must be an object");
    const Json& k = field(j, "kind", where);
    if (!k.is_string()) throw MalformedDocument(where + ".kind", "must be a string");
    std::string kind = k.get<std::string>();
    return named(where, [&] {
        if (kind == "power") return SwitchingFunction::power(number(j, "r", where));
        if (kind == "threshold") return SwitchingFunction::threshold(number(j, "alpha", where));
        if (kind == "halfpoint") return SwitchingFunction::half_point(number(j, "eps", where));
        if (kind == "table") return SwitchingFunction::table(points_from(j, where));
        throw MalformedDocument(where + ".kind", "unknown switching function '" + kind + "'");
    });
}

SelectionFunction selection_from(const Json& j, const std::string& where) {
    if (!j.is_object()) throw MalformedDocument(where, "must be an object");
    const Json& k = field(j, "kind", where);
    if (!k.is_string()) throw MalformedDocument(where + ".kind", "must be a string");
    std::string kind = k.get<std::string>();
    return named(where, [&] {
        if (kind == "tullock") return SelectionFunction::tullock(number(j, "s", where));
        if (kind == "table") return SelectionFunction::table(points_from(j, where));
        throw MalformedDocument(where + ".kind", "unknown selection function '" + kind + "'");
    });
}

Allocation allocation_from(const Json& j, int n, const std::string& where) {
    if (!j.is_object()) throw MalformedDocument(where, "must be an object with counts or seeds");
    if (j.contains("counts")) {
        auto c = int_list(j["counts"], where + ".counts");
        if (static_cast<int>(c.size()) != n)
            throw ValidationError(where + ".counts", "length " + std::to_string(c.size()) + " differs from n = " +
                                                         std::to_string(n));
        for (std::size_t v = 0; v < c.size(); ++v)
            if (c[v] < 0) throw ValidationError(where + ".counts[" + std::to_string(v) + "]", "negative count");
        return Allocation::from_counts(c);
    }
    if (j.contains("seeds")) {
        auto s = int_list(j["seeds"], where + ".seeds");
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] < 0 || s[i] >= n)
                throw VertexOutOfRange(where + ".seeds[" + std::to_string(i) + "]", "vertex id out of range");
        return Allocation(n, s);
    }
    throw MalformedDocument(where, "needs counts or seeds");
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Json graph_to_json(const Graph& g) { return Json::parse(serialize_graph(g)); }

Graph graph_from_json(const Json& j, const std::string& where) {
    try {
        return load_graph(j.dump());
    } catch (const ValidationError& e) {
        rethrow_under(where, e);
    }
}

AdoptionFunction dynamics_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) throw MalformedDocument(where, "must be an object");
    if (j.contains("h")) {
        if (!j["h"].is_string()) throw MalformedDocument(where + ".h", "must be a string");
        std::string h = j["h"].get<std::string>();
        const std::string prefix = "builtin:";
        if (h.rfind(prefix, 0) != 0) throw MalformedDocument(where + ".h", "expected builtin:<name>");
        return named(where + ".h", [&] { return AdoptionFunction::builtin(h.substr(prefix.size())); });
    }
    auto f = switching_from(field(j, "f", where), where + ".f");
    auto g = selection_from(field(j, "g", where), where + ".g");
    return AdoptionFunction::from_switch_select(f, g);
}

Json dynamics_to_json(const AdoptionFunction& h) {
    Json j;
    if (!h.f() || !h.g()) {
        j["h"] = "builtin:" + h.name();
        return j;
    }
    const auto& f = *h.f();
    Json jf;
    switch (f.kind()) {
        case SwitchingFunction::Kind::Power: jf = {{"kind", "power"}, {"r", f.param()}}; break;
        case SwitchingFunction::Kind::Threshold: jf = {{"kind", "threshold"}, {"alpha", f.param()}}; break;
        case SwitchingFunction::Kind::HalfPoint: jf = {{"kind", "halfpoint"}, {"eps", f.param()}}; break;
        case SwitchingFunction::Kind::Table: jf = {{"kind", "table"}, {"points", points_to(f.points())}}; break;
    }
    const auto& g = *h.g();
    Json jg;
    if (g.kind() == SelectionFunction::Kind::Tullock)
        jg = {{"kind", "tullock"}, {"s", g.param()}};
    else
        jg = {{"kind", "table"}, {"points", points_to(g.points())}};
    j["f"] = jf;
    j["g"] = jg;
    return j;
}

UpdateSchedule schedule_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) throw MalformedDocument(where, "must be an object");
    const Json& k = field(j, "kind", where);
    if (!k.is_string()) throw MalformedDocument(where + ".kind", "must be a string");
    std::string kind = k.get<std::string>();
    if (kind == "parallel") {
        ParallelRounds p;
        p.max_rounds = static_cast<int>(integer(j, "max_rounds", where));
        if (p.max_rounds < 1) throw ValidationError(where + ".max_rounds", "must be at least 1");
        if (j.contains("immunity")) {
            if (!j["immunity"].is_boolean()) throw MalformedDocument(where + ".immunity", "must be boolean");
            p.immunity = j["immunity"].get<bool>();
        }
        return p;
    }
    if (kind == "single_pass") return SinglePassOrder{int_list(field(j, "order", where), where + ".order")};
    if (kind == "layer_order") {
        const Json& L = field(j, "layers", where);
        if (!L.is_array()) throw MalformedDocument(where + ".layers", "must be an array of arrays");
        LayerOrder lo;
        for (std::size_t i = 0; i < L.size(); ++i)
            lo.layers.push_back(int_list(L[i], where + ".layers[" + std::to_string(i) + "]"));
        return lo;
    }
    if (kind == "random_sequential") {
        RandomSequential r{integer(j, "max_steps", where)};
        if (r.max_steps < 0) throw ValidationError(where + ".max_steps", "must be nonnegative");
        return r;
    }
    throw MalformedDocument(where + ".kind", "unknown schedule '" + kind + "'");
}

Json schedule_to_json(const UpdateSchedule& s) {
    Json j;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ParallelRounds>) {
                j = {{"kind", "parallel"}, {"max_rounds", x.max_rounds}, {"immunity", x.immunity}};
            } else if constexpr (std::is_same_v<T, SinglePassOrder>) {
                j = {{"kind", "single_pass"}, {"order", x.order}};
            } else if constexpr (std::is_same_v<T, LayerOrder>) {
                j = {{"kind", "layer_order"}, {"layers", x.layers}};
            } else {
                j = {{"kind", "random_sequential"}, {"max_steps", x.max_steps}};
            }
        },
        s);
    return j;
}

MixedStrategy strategy_from_json(const Json& j, int n, const std::string& where) {
    if (j.is_array()) {
        MixedStrategy m;
        double total = 0.0;
        for (std::size_t i = 0; i < j.size(); ++i) {
            std::string w = where + "[" + std::to_string(i) + "]";
            double p = number(j[i], "p", w);
            if (!(p >= 0.0)) throw ValidationError(w + ".p", "probability must be nonnegative");
            total += p;
            m.support.emplace_back(p, allocation_from(j[i], n, w));
        }
        if (m.support.empty()) throw ValidationError(where, "mixed strategy has empty support");
        if (std::abs(total - 1.0) > 1e-9) throw ValidationError(where, "probabilities must sum to 1");
        return m;
    }
    return MixedStrategy::pure(allocation_from(j, n, where));
}

Json allocation_to_json(const Allocation& a) { return Json{{"counts", a.counts()}}; }

Json strategy_to_json(const MixedStrategy& s) {
    if (s.is_pure() && s.support.front().first == 1.0) return allocation_to_json(s.pure_allocation());
    Json a = Json::array();
    for (const auto& [p, al] : s.support) a.push_back({{"p", p}, {"counts", al.counts()}});
    return a;
}

StrategyProfile profile_from_json(const Json& j, int n, const std::string& where) {
    if (!j.is_object()) throw MalformedDocument(where, "must be an object with red and blue");
    StrategyProfile p;
    p.red = strategy_from_json(field(j, "red", where), n, where + ".red");
    p.blue = strategy_from_json(field(j, "blue", where), n, where + ".blue");
    return p;
}

Json profile_to_json(const StrategyProfile& p) {
    Json j;
    j["red"] = strategy_to_json(p.red);
    j["blue"] = strategy_to_json(p.blue);
    return j;
}

Json payoff_to_json(const PayoffEstimate& e) {
    Json j;
    j["pi_R"] = e.pi_R;
    j["pi_B"] = e.pi_B;
    j["method"] = to_string(e.method);
    j["n_trials"] = e.n_trials;
    j["stderr_R"] = e.stderr_R;
    j["stderr_B"] = e.stderr_B;
    if (e.method == PayoffMethod::ExactLayeredDp) j["truncated_mass"] = e.truncated_mass;
    return j;
}

std::string payoff_csv_header() { return "pi_R,pi_B,method,n_trials,stderr_R,stderr_B\n"; }

std::string payoff_csv_row(const PayoffEstimate& e) {
    return format_double(e.pi_R) + "," + format_double(e.pi_B) + "," + to_string(e.method) + "," +
           std::to_string(e.n_trials) + "," + format_double(e.stderr_R) + "," + format_double(e.stderr_B) + "\n";
}

namespace {

Json seeds_json(const Allocation& a) { return Json(a.seeds()); }

std::string seeds_str(const Allocation& a) {
    std::string s;
    for (int v : a.seeds()) s += (s.empty() ? "" : " ") + std::to_string(v);
    return s;
}

// Non-finite values have no JSON number form.
Json num_or_string(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

Json nash_to_json(const NashReport& r) {
    Json j;
    j["method"] = to_string(r.method);
    j["statistical"] = r.statistical;
    j["eps"] = r.eps;
    j["symmetry_reduced"] = r.symmetry_reduced;
    j["red_space"] = r.red_space;
    j["profiles"] = r.profiles;
    Json eq = Json::array();
    for (const auto& e : r.equilibria) {
        Json x;
        x["red"] = seeds_json(e.red);
        x["blue"] = seeds_json(e.blue);
        x["payoff"] = payoff_to_json(e.payoff);
        x["joint"] = e.payoff.joint();
        eq.push_back(std::move(x));
    }
    j["equilibria"] = std::move(eq);
    return j;
}

Json efficiency_to_json(const EfficiencyReport& r) {
    Json j;
    j["has_pure_nash"] = r.has_pure_nash;
    if (r.max_joint) {
        j["max_joint"] = {{"value", r.max_joint->value},
                          {"red", seeds_json(r.max_joint->red)},
                          {"blue", seeds_json(r.max_joint->blue)},
                          {"lower_bound", r.max_joint->lower_bound}};
        j["poa"] = r.has_pure_nash ? num_or_string(r.poa) : Json(nullptr);
        j["poa_infinite"] = r.poa_infinite;
    } else {
        j["bm"] = r.has_pure_nash ? num_or_string(r.bm) : Json(nullptr);
        j["bm_infinite"] = r.bm_infinite;
        j["bm_index"] = r.bm_index;
    }
    j["budget_ratio"] = r.budget_ratio;
    if (r.has_pure_nash) {
        j["worst_nash_joint"] = r.worst_nash_joint;
        j["best_nash_joint"] = r.best_nash_joint;
        j["worst_index"] = r.worst_index;
        j["best_index"] = r.best_index;
    }
    j["nash"] = nash_to_json(r.nash);
    j["caveats"] = r.caveats;
    return j;
}

std::string equilibria_csv(const NashReport& r, std::size_t worst, std::size_t best) {
    std::ostringstream os;
    os << "red,blue,pi_R,pi_B,joint,is_worst,is_best\n";
    for (std::size_t i = 0; i < r.equilibria.size(); ++i) {
        const auto& e = r.equilibria[i];
        os << seeds_str(e.red) << ',' << seeds_str(e.blue) << ',' << format_double(e.payoff.pi_R) << ','
           << format_double(e.payoff.pi_B) << ',' << format_double(e.payoff.joint()) << ',' << (i == worst ? 1 : 0)
           << ',' << (i == best ? 1 : 0) << '\n';
    }
    return os.str();
}

Json predictions_to_json(const GadgetSpec& g) {
    Json j;
    j["kind"] = g.kind;
    Json params;
    for (const auto& [k, v] : g.params) params[k] = v;
    j["params"] = params;
    Json preds;
    for (const auto& [k, p] : g.predictions) preds[k] = {{"value", num_or_string(p.value)}, {"formula", p.formula}};
    j["predictions"] = preds;
    Json conds = Json::array();
    for (const auto& c : g.conditions) conds.push_back({{"name", c.name}, {"formula", c.formula}, {"holds", c.holds}});
    j["conditions"] = conds;
    j["layout"] = g.layout;
    return j;
}

Json verification_to_json(const VerificationReport& r) {
    Json j;
    j["kind"] = r.kind;
    j["passed"] = r.passed;
    j["designated"] = payoff_to_json(r.designated);
    j["designated_is_nash"] = r.designated_is_nash;
    j["deviation_set_restricted"] = r.deviation_set_restricted;
    Json ents = Json::array();
    for (const auto& e : r.entries)
        ents.push_back({{"name", e.name},
                        {"measured", num_or_string(e.measured)},
                        {"predicted", num_or_string(e.predicted)},
                        {"rel_error", num_or_string(e.rel_error)},
                        {"pass", e.pass},
                        {"note", e.note}});
    j["entries"] = ents;
    Json devs = Json::array();
    for (const auto& d : r.deviations)
        devs.push_back({{"name", d.name},
                        {"player", d.player == Player::Red ? "red" : "blue"},
                        {"payoff", d.payoff},
                        {"baseline", d.baseline},
                        {"improving", d.improving}});
    j["deviations"] = devs;
    Json conds = Json::array();
    for (const auto& c : r.conditions) conds.push_back({{"name", c.name}, {"formula", c.formula}, {"holds", c.holds}});
    j["conditions"] = conds;
    return j;
}

std::string verification_csv(const VerificationReport& r) {
    std::ostringstream os;
    os << "name,measured,predicted,rel_error,pass\n";
    for (const auto& e : r.entries)
        os << e.name << ',' << format_double(e.measured) << ',' << format_double(e.predicted) << ','
           << format_double(e.rel_error) << ',' << (e.pass ? 1 : 0) << '\n';
    int improving = 0;
    for (const auto& d : r.deviations) improving += d.improving;
    os << "improving_deviations," << improving << ",0,0," << (improving == 0 ? 1 : 0) << '\n';
    for (const auto& c : r.conditions) os << c.name << ',' << (c.holds ? 1 : 0) << ",1,0," << (c.holds ? 1 : 0) << '\n';
    return os.str();
}

Json couple_report_to_json(const CoupleTestReport& r) {
    Json j;
    j["mode"] = to_string(r.mode);
    j["runs"] = r.runs;
    j["invariant_violations"] = r.invariant_violations;
    Json m, p;
    for (const auto& [k, v] : r.inequality_margins) m[k] = num_or_string(v);
    for (const auto& [k, v] : r.p_values) p[k] = num_or_string(v);
    j["inequality_margins"] = m;
    j["p_values"] = p;
    j["passed"] = r.passed;
    return j;
}

std::string couple_report_csv(const CoupleTestReport& r) {
    std::ostringstream os;
    os << "kind,name,value\n";
    os << "count,runs," << r.runs << '\n';
    os << "count,invariant_violations," << r.invariant_violations << '\n';
    for (const auto& [k, v] : r.inequality_margins) os << "margin," << k << ',' << format_double(v) << '\n';
    for (const auto& [k, v] : r.p_values) os << "p_value," << k << ',' << format_double(v) << '\n';
    return os.str();
}

}  // namespace contagion
