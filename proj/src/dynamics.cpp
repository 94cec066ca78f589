#include "contagion/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

constexpr int kValidationGrid = 1024;
constexpr double kClampSlack = 1e-9;

double clamp_prob(double v, const char* what) {
    if (!(v >= -kClampSlack && v <= 1.0 + kClampSlack))
        throw DynamicsError(what, "value " + std::to_string(v) + " outside [0,1]");
    return std::clamp(v, 0.0, 1.0);
}

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(what, "argument " + std::to_string(x) + " outside [0,1]");
}

double interpolate(const Breakpoints& pts, double x) {
    auto it = std::upper_bound(pts.begin(), pts.end(), x, [](double v, const auto& p) { return v < p.first; });
    if (it == pts.begin()) return pts.front().second;
    if (it == pts.end()) return pts.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (hi.first == lo.first) return hi.second;
    double t = (x - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
}

void validate_points(const Breakpoints& pts, const char* what) {
    if (pts.size() < 2) throw ValidationError(what, "table needs at least two points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        check_unit(pts[i].first, what);
        if (i > 0 && pts[i].first <= pts[i - 1].first)
            throw ValidationError(what, "table x values must be strictly increasing");
    }
    if (pts.front().first != 0.0 || pts.back().first != 1.0)
        throw ValidationError(what, "table must span x = 0 to x = 1");
}

// f(0)=0, f(1)=1, nondecreasing, range within [0,1].
template <class F>
void validate_unit_map(const F& fn, const char* what) {
    double prev = 0.0;
    for (int i = 0; i <= kValidationGrid; ++i) {
        double x = static_cast<double>(i) / kValidationGrid;
        double v = fn(x);
        if (!(v >= -kPredicateTol && v <= 1.0 + kPredicateTol))
            throw ValidationError(what, "value outside [0,1] at x=" + std::to_string(x));
        if (i == 0 && std::abs(v) > kPredicateTol) throw ValidationError(what, "must vanish at 0");
        if (i == kValidationGrid && std::abs(v - 1.0) > kPredicateTol) throw ValidationError(what, "must equal 1 at 1");
        if (i > 0 && v < prev - kPredicateTol)
            throw ValidationError(what, "must be nondecreasing (x=" + std::to_string(x) + ")");
        prev = v;
    }
}

}  // namespace

// Switching function ---------------------------------------------------------

SwitchingFunction::SwitchingFunction(Kind k, double p, Breakpoints pts)
    : kind_(k), param_(p), points_(std::move(pts)) {
    validate();
}

SwitchingFunction SwitchingFunction::power(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("f.r", "exponent must be positive");
    return SwitchingFunction(Kind::Power, r, {});
}

SwitchingFunction SwitchingFunction::threshold(double alpha_star) {
    if (!(alpha_star > 0.0 && alpha_star < 1.0)) throw ValidationError("f.alpha", "threshold must lie in (0,1)");
    return SwitchingFunction(Kind::Threshold, alpha_star, {});
}

SwitchingFunction SwitchingFunction::half_point(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("f.eps", "epsilon must lie in [0,1]");
    return SwitchingFunction(Kind::HalfPoint, epsilon, {{0.0, 0.0}, {0.5, epsilon}, {1.0, 1.0}});
}

SwitchingFunction SwitchingFunction::table(Breakpoints points) {
    validate_points(points, "f.points");
    return SwitchingFunction(Kind::Table, 0.0, std::move(points));
}

double SwitchingFunction::raw(double x) const {
    switch (kind_) {
        case Kind::Power:
            return param_ == 1.0 ? x : std::pow(x, param_);
        case Kind::Threshold:
            return x >= param_ ? 1.0 : 0.0;
        case Kind::HalfPoint:
        case Kind::Table:
            return interpolate(points_, x);
    }
    return 0.0;
}

void SwitchingFunction::validate() const { validate_unit_map([this](double x) { return raw(x); }, "f"); }

double SwitchingFunction::operator()(double x) const {
    check_unit(x, "f");
    return clamp_prob(raw(x), "f");
}

// Selection function ---------------------------------------------------------

SelectionFunction::SelectionFunction(Kind k, double p, Breakpoints pts)
    : kind_(k), param_(p), points_(std::move(pts)) {
    validate();
}

SelectionFunction SelectionFunction::tullock(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("g.s", "Tullock exponent must be positive");
    return SelectionFunction(Kind::Tullock, s, {});
}

SelectionFunction SelectionFunction::table(Breakpoints points) {
    validate_points(points, "g.points");
    return SelectionFunction(Kind::Table, 0.0, std::move(points));
}

double SelectionFunction::raw(double y) const {
    if (kind_ == Kind::Table) return interpolate(points_, y);
    if (param_ == 1.0) return y;
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    // Ratio form keeps large exponents finite.
    double ratio = std::pow((1.0 - y) / y, param_);
    return 1.0 / (1.0 + ratio);
}

void SelectionFunction::validate() const {
    validate_unit_map([this](double y) { return raw(y); }, "g");
    for (int i = 0; i <= kValidationGrid; ++i) {
        double y = static_cast<double>(i) / kValidationGrid;
        if (std::abs(raw(y) + raw(1.0 - y) - 1.0) > kPredicateTol)
            throw ValidationError("g", "must satisfy g(y) + g(1-y) = 1 (y=" + std::to_string(y) + ")");
    }
}

double SelectionFunction::operator()(double y) const {
    check_unit(y, "g");
    return clamp_prob(raw(y), "g");
}

// Adoption function ----------------------------------------------------------

AdoptionFunction AdoptionFunction::from_switch_select(SwitchingFunction f, SelectionFunction g) {
    AdoptionFunction a;
    a.f_ = f;
    a.g_ = g;
    a.h_ = [f, g](double x, double y) {
        double t = x + y;
        if (t <= 0.0) return 0.0;
        if (t > 1.0 + kPredicateTol) throw ValidationError("h", "fractions sum above 1");
        t = std::min(t, 1.0);
        return f(t) * g(std::min(1.0, x / t));
    };
    a.name_ = "switch_select";
    return a;
}

AdoptionFunction AdoptionFunction::builtin(const std::string& name) {
    if (name == "a_one_minus_b_sq")
        return custom(name, [](double a, double b) { return a * (1.0 - b * b); });
    throw ValidationError("h", "unknown builtin adoption function '" + name + "'");
}

AdoptionFunction AdoptionFunction::custom(std::string name, std::function<double(double, double)> h) {
    AdoptionFunction a;
    a.h_ = std::move(h);
    a.name_ = std::move(name);
    if (std::abs(a.h_(0.0, 0.0)) > kPredicateTol) throw DynamicsError("h", "h(0,0) must be 0");
    return a;
}

double AdoptionFunction::h(double a, double b) const {
    if (!(a >= 0.0 && b >= 0.0) || a + b > 1.0 + kPredicateTol)
        throw ValidationError("h", "fractions outside the admissible simplex");
    return clamp_prob(h_(a, b), "h");
}

std::pair<double, double> AdoptionFunction::probs(int cr, int cb, int deg) const {
    if (cr + cb == 0) return {0.0, 0.0};
    if (f_) {
        double ft = (*f_)(static_cast<double>(cr + cb) / deg);
        if (ft == 0.0) return {0.0, 0.0};
        double y = static_cast<double>(cr) / (cr + cb);
        double gy = (*g_)(y), gz = (*g_)(static_cast<double>(cb) / (cr + cb));
        return {ft * gy, ft * gz};
    }
    double a = static_cast<double>(cr) / deg, b = static_cast<double>(cb) / deg;
    double pr = h(a, b), pb = h(b, a);
    if (pr + pb > 1.0 + kClampSlack) throw DynamicsError("h", "H(a,b) exceeds 1");
    return {pr, pb};
}

// Predicates -----------------------------------------------------------------

namespace {

std::set<int> denominators(double grid_step, const Graph* g) {
    std::set<int> dens;
    if (!(grid_step > 0.0 && grid_step <= 0.1)) throw ValidationError("grid_step", "must lie in (0, 0.1]");
    dens.insert(static_cast<int>(std::lround(1.0 / grid_step)));
    if (g)
        for (int v = 0; v < g->n(); ++v)
            if (g->in_degree(v) > 0) dens.insert(g->in_degree(v));
    return dens;
}

}  // namespace

std::vector<CompetitiveViolation> check_competitive(const AdoptionFunction& h, double grid_step, const Graph* g) {
    std::vector<CompetitiveViolation> out;
    for (int d : denominators(grid_step, g))
        for (int i = 0; i <= d; ++i) {
            double solo = h.probs(i, 0, d).first;
            for (int j = 1; i + j <= d; ++j) {
                double joint = h.probs(i, j, d).first;
                if (joint > solo + kPredicateTol)
                    out.push_back({static_cast<double>(i) / d, static_cast<double>(j) / d, joint, solo});
            }
        }
    return out;
}

std::vector<AdditiveViolation> check_additive(const AdoptionFunction& h, double grid_step, const Graph* g) {
    std::vector<AdditiveViolation> out;
    for (int d : denominators(grid_step, g))
        for (int k = 0; k <= d; ++k) {
            double lo = 2.0, hi = -1.0;
            for (int i = 0; i <= k; ++i) {
                auto [pr, pb] = h.probs(i, k - i, d);
                lo = std::min(lo, pr + pb);
                hi = std::max(hi, pr + pb);
            }
            if (hi - lo > kPredicateTol) out.push_back({static_cast<double>(k) / d, hi - lo});
        }
    return out;
}

Decomposition decompose(const AdoptionFunction& h, double grid_step) {
    Decomposition d;
    d.selection = [h](double a, double b) {
        double total = h.H(a, b);
        return total > 0.0 ? h.h(a, b) / total : std::nan("");
    };
    int den = static_cast<int>(std::lround(1.0 / grid_step));
    for (int i = 0; i <= den; ++i)
        for (int j = 0; i + j <= den; ++j) {
            auto [pr, pb] = h.probs(i, j, den);
            if (pr + pb <= 0.0) d.undefined_selection.emplace_back(static_cast<double>(i) / den, static_cast<double>(j) / den);
        }
    if (check_additive(h, grid_step).empty()) {
        Breakpoints pts;
        for (int k = 0; k <= den; ++k) {
            auto [pr, pb] = h.probs(k, 0, den);
            pts.emplace_back(static_cast<double>(k) / den, pr + pb);
        }
        try {
            d.additive_f = SwitchingFunction::table(std::move(pts));
        } catch (const ValidationError&) {
            d.additive_f.reset();
        }
    }
    return d;
}

}  // namespace contagion
