#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contagion/graph.hpp"

namespace contagion {

using Breakpoints = std::vector<std::pair<double, double>>;

// Probability of adopting either product given the infected fraction.
class SwitchingFunction {
public:
    enum class Kind { Power, Threshold, HalfPoint, Table };

    static SwitchingFunction power(double r);
    static SwitchingFunction threshold(double alpha_star);
    static SwitchingFunction half_point(double epsilon);
    static SwitchingFunction table(Breakpoints points);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    double param() const { return param_; }
    const Breakpoints& points() const { return points_; }
    bool is_linear() const { return kind_ == Kind::Power && param_ == 1.0; }

private:
    SwitchingFunction(Kind k, double p, Breakpoints pts);
    double raw(double x) const;
    void validate() const;

    Kind kind_;
    double param_;
    Breakpoints points_;
};

// Probability of choosing Red given Red's share of infected neighbours.
class SelectionFunction {
public:
    enum class Kind { Tullock, Table };

    static SelectionFunction tullock(double s);
    static SelectionFunction linear() { return tullock(1.0); }
    static SelectionFunction table(Breakpoints points);

    double operator()(double y) const;

    Kind kind() const { return kind_; }
    double param() const { return param_; }
    const Breakpoints& points() const { return points_; }
    bool is_linear() const { return kind_ == Kind::Tullock && param_ == 1.0; }

private:
    SelectionFunction(Kind k, double p, Breakpoints pts);
    double raw(double y) const;
    void validate() const;

    Kind kind_;
    double param_;
    Breakpoints points_;
};

// h(a, b): probability that an update infects with Red when fractions (a, b)
// of in-neighbours are Red and Blue.
class AdoptionFunction {
public:
    static AdoptionFunction from_switch_select(SwitchingFunction f, SelectionFunction g);
    // Names: "a_one_minus_b_sq" for h(a,b) = a(1-b^2).
    static AdoptionFunction builtin(const std::string& name);
    static AdoptionFunction custom(std::string name, std::function<double(double, double)> h);

    double h(double a, double b) const;
    double H(double a, double b) const { return h(a, b) + h(b, a); }

    // Red and Blue infection probabilities for a vertex with cr Red and cb
    // Blue in-neighbours out of deg, computed from counts to avoid rounding
    // in a + b.
    std::pair<double, double> probs(int cr, int cb, int deg) const;

    const std::optional<SwitchingFunction>& f() const { return f_; }
    const std::optional<SelectionFunction>& g() const { return g_; }
    const std::string& name() const { return name_; }

private:
    std::optional<SwitchingFunction> f_;
    std::optional<SelectionFunction> g_;
    std::function<double(double, double)> h_;
    std::string name_;
};

struct CompetitiveViolation {
    double a, b, h_ab, h_a0;
};
struct AdditiveViolation {
    double total, spread;
};

constexpr double kDefaultGridStep = 1.0 / 64.0;
constexpr double kPredicateTol = 1e-12;

// Grid checks; when g is given, the exact fractions realizable on g are
// checked too.
std::vector<CompetitiveViolation> check_competitive(const AdoptionFunction& h, double grid_step = kDefaultGridStep,
                                                    const Graph* g = nullptr);
std::vector<AdditiveViolation> check_additive(const AdoptionFunction& h, double grid_step = kDefaultGridStep,
                                              const Graph* g = nullptr);

struct Decomposition {
    std::function<double(double, double)> selection;  // h/H where H > 0
    std::optional<SwitchingFunction> additive_f;      // tabulated H(x, 0)
    std::vector<std::pair<double, double>> undefined_selection;
};
Decomposition decompose(const AdoptionFunction& h, double grid_step = kDefaultGridStep);

}  // namespace contagion
