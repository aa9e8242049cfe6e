#include "fks/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fks/errors.hpp"

namespace fks {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Section {
  public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ConfigError((where.empty() ? std::string("/") : where) + ": " + what);
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }
    std::string at(const std::string& key) const { return path_ + "/" + key; }

    void number(const std::string& key, double& out) {
        if (!has(key))
            return;
        out = to_number(j_.at(key), at(key));
    }
    void integer(const std::string& key, int& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            fail(at(key), "expected an integer");
        out = v.get<int>();
    }
    void boolean(const std::string& key, bool& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_boolean())
            fail(at(key), "expected true or false");
        out = v.get<bool>();
    }
    void string(const std::string& key, std::string& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_string())
            fail(at(key), "expected a string");
        out = v.get<std::string>();
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_array())
            fail(at(key), "expected an array of numbers");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(to_number(v[i], at(key) + "/" + std::to_string(i)));
    }
    Section child(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(j_.contains(key) ? j_.at(key) : empty, at(key));
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(at(it.key()), "unknown field");
    }

    static double to_number(const json& v, const std::string& where) {
        if (v.is_number())
            return v.get<double>();
        if (v.is_string()) {
            std::string s = v.get<std::string>();
            if (s == "inf" || s == "infinity")
                return kInf;
        }
        fail(where, "expected a number");
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json number_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

template <class F>
void guarded(const std::string& where, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace

const char* initial_kind_name(InitialKind k) {
    switch (k) {
        case InitialKind::gaussian: return "gaussian";
        case InitialKind::two_bumps: return "two_bumps";
        case InitialKind::file: return "file";
        case InitialKind::constant: return "constant";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    guarded("/model", [&] { model.validate(); });
    guarded("/grid", [&] { grid.validate(); });
    if (grid.n != model.n)
        throw ConfigError("/grid/n: differs from /model/n");
    guarded("/solver", [&] { solver.validate(); });
    if (std::abs(solver.steps() * solver.dt - solver.t_end) > 1e-9 * solver.t_end)
        throw ConfigError("/solver/t_end: must be an integer multiple of dt");
    guarded("/diagnostics/nu", [&] {
        if (diagnostics.nu != 0.0)
            check_moment_order(diagnostics.nu, model);
    });
    for (double p : diagnostics.lp_set)
        if (!(p >= 1.0))
            throw ConfigError("/diagnostics/lp_set: every p must be >= 1");
    if (diagnostics.snapshot_stride < 1)
        throw ConfigError("/diagnostics/snapshot_stride: must be >= 1");
    const auto& ic = initial_condition;
    switch (ic.kind) {
        case InitialKind::gaussian:
        case InitialKind::two_bumps:
            if (!(ic.width > 0.0))
                throw ConfigError("/initial_condition/width: must be > 0");
            if (!std::isfinite(ic.mass))
                throw ConfigError("/initial_condition/mass: must be finite");
            if (!ic.center.empty() && static_cast<int>(ic.center.size()) != model.n)
                throw ConfigError("/initial_condition/center: needs n components");
            break;
        case InitialKind::file:
            if (ic.path.empty())
                throw ConfigError("/initial_condition/path: required for file data");
            break;
        case InitialKind::constant:
            if (!std::isfinite(ic.value))
                throw ConfigError("/initial_condition/value: must be finite");
            break;
    }
    if (outputs.empty())
        throw ConfigError("/outputs: must name a directory");
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what());
    }
    ExperimentConfig c;
    Section top(root, "");

    Section m = top.child("model");
    m.number("beta", c.model.beta);
    m.number("alpha", c.model.alpha);
    m.number("gamma", c.model.gamma_pot);
    m.integer("n", c.model.n);
    if (m.has("s_const")) {
        double s = 0.0;
        m.number("s_const", s);
        c.model.s_const = s;
    }
    m.finish();

    Section g = top.child("grid");
    c.grid.n = c.model.n;
    g.integer("n", c.grid.n);
    g.integer("points_per_axis", c.grid.points_per_axis);
    g.number("side_length", c.grid.side_length);
    g.number("dealias_fraction", c.grid.dealias_fraction);
    g.finish();

    Section s = top.child("solver");
    s.number("dt", c.solver.dt);
    s.number("t_end", c.solver.t_end);
    s.integer("corrector_passes", c.solver.corrector_passes);
    s.number("blowup_guard", c.solver.blowup_guard);
    s.number("picard_tol", c.solver.picard_tol);
    s.integer("picard_max_iter", c.solver.picard_max_iter);
    s.boolean("nonlinear", c.solver.nonlinear);
    {
        Section ml = s.child("ml");
        ml.number("series_cutoff", c.solver.ml.series_cutoff);
        ml.number("asymptotic_cutoff", c.solver.ml.asymptotic_cutoff);
        ml.integer("max_terms", c.solver.ml.max_terms);
        ml.integer("quad_nodes", c.solver.ml.quad_nodes);
        ml.number("target_rel_err", c.solver.ml.target_rel_err);
        ml.finish();
    }
    s.finish();

    if (!root.contains("initial_condition"))
        Section::fail("/initial_condition", "required");
    Section ic = top.child("initial_condition");
    std::string type;
    ic.string("type", type);
    auto& I = c.initial_condition;
    if (type == "gaussian" || type == "two_bumps") {
        I.kind = type == "gaussian" ? InitialKind::gaussian : InitialKind::two_bumps;
        ic.number("mass", I.mass);
        ic.number("width", I.width);
        ic.numbers("center", I.center);
        if (I.kind == InitialKind::two_bumps)
            ic.number("separation", I.separation);
    } else if (type == "file") {
        I.kind = InitialKind::file;
        ic.string("path", I.path);
    } else if (type == "constant") {
        I.kind = InitialKind::constant;
        ic.number("value", I.value);
    } else {
        Section::fail("/initial_condition/type",
                      "expected gaussian, two_bumps, file or constant, got '" + type + "'");
    }
    if (ic.has("seed")) {
        const json& v = root.at("initial_condition").at("seed");
        if (!v.is_number_unsigned())
            Section::fail("/initial_condition/seed", "expected a non-negative integer");
        I.seed = v.get<std::uint64_t>();
    }
    ic.finish();

    Section d = top.child("diagnostics");
    d.number("nu", c.diagnostics.nu);
    d.numbers("lp_set", c.diagnostics.lp_set);
    d.integer("snapshot_stride", c.diagnostics.snapshot_stride);
    d.finish();
    c.solver.snapshot_stride = c.diagnostics.snapshot_stride;

    top.string("outputs", c.outputs);
    top.finish();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string to_json_text(const ExperimentConfig& c, int indent) {
    json j;
    j["model"] = {{"beta", c.model.beta}, {"alpha", c.model.alpha}, {"gamma", c.model.gamma_pot},
                  {"n", c.model.n}};
    j["model"]["s_const"] = c.model.s_const ? json(*c.model.s_const) : json(nullptr);
    j["grid"] = {{"n", c.grid.n},
                 {"points_per_axis", c.grid.points_per_axis},
                 {"side_length", c.grid.side_length},
                 {"dealias_fraction", c.grid.dealias_fraction}};
    const auto& ml = c.solver.ml;
    j["solver"] = {{"dt", c.solver.dt},
                   {"t_end", c.solver.t_end},
                   {"corrector_passes", c.solver.corrector_passes},
                   {"blowup_guard", c.solver.blowup_guard},
                   {"picard_tol", c.solver.picard_tol},
                   {"picard_max_iter", c.solver.picard_max_iter},
                   {"nonlinear", c.solver.nonlinear},
                   {"ml",
                    {{"series_cutoff", ml.series_cutoff},
                     {"asymptotic_cutoff", ml.asymptotic_cutoff},
                     {"max_terms", ml.max_terms},
                     {"quad_nodes", ml.quad_nodes},
                     {"target_rel_err", ml.target_rel_err}}}};
    const auto& I = c.initial_condition;
    json ic = {{"type", initial_kind_name(I.kind)}};
    switch (I.kind) {
        case InitialKind::two_bumps: ic["separation"] = I.separation; [[fallthrough]];
        case InitialKind::gaussian:
            ic["mass"] = I.mass;
            ic["width"] = I.width;
            ic["center"] = I.center;
            break;
        case InitialKind::file: ic["path"] = I.path; break;
        case InitialKind::constant: ic["value"] = I.value; break;
    }
    if (I.seed)
        ic["seed"] = *I.seed;
    j["initial_condition"] = ic;
    json lp = json::array();
    for (double p : c.diagnostics.lp_set)
        lp.push_back(number_json(p));
    j["diagnostics"] = {{"nu", c.diagnostics.nu},
                        {"lp_set", lp},
                        {"snapshot_stride", c.diagnostics.snapshot_stride}};
    j["outputs"] = c.outputs;
    return j.dump(indent);
}

PhysicalField build_initial_condition(const ExperimentConfig& cfg) {
    const GridSpec& g = cfg.grid;
    const auto& I = cfg.initial_condition;
    std::vector<double> c0 = I.center.empty() ? std::vector<double>(g.n, 0.0) : I.center;
    auto gauss = [&](std::span<const double> x, const std::vector<double>& c, double m) {
        double r2 = 0.0;
        for (int a = 0; a < g.n; ++a)
            r2 += (x[a] - c[a]) * (x[a] - c[a]);
        double norm = std::pow(2.0 * M_PI * I.width * I.width, -0.5 * g.n);
        return m * norm * std::exp(-0.5 * r2 / (I.width * I.width));
    };
    switch (I.kind) {
        case InitialKind::gaussian:
            return sample(g, [&](std::span<const double> x) { return gauss(x, c0, I.mass); });
        case InitialKind::two_bumps: {
            std::vector<double> a = c0, b = c0;
            a[0] -= 0.5 * I.separation;
            b[0] += 0.5 * I.separation;
            return sample(g, [&](std::span<const double> x) {
                return gauss(x, a, 0.5 * I.mass) + gauss(x, b, 0.5 * I.mass);
            });
        }
        case InitialKind::file: {
            PhysicalField f;
            try {
                f = read_fks1(I.path);
            } catch (const Error& e) {
                throw ConfigError("/initial_condition/path: " + std::string(e.what()));
            }
            const GridSpec& h = f.grid();
            if (h.n != g.n || h.points_per_axis != g.points_per_axis || h.side_length != g.side_length)
                throw ConfigError("/initial_condition/path: FKS1 header (n, N, L) does not match the grid");
            return PhysicalField(g, f.values());
        }
        case InitialKind::constant:
            return PhysicalField(g, std::vector<double>(g.size(), I.value));
    }
    throw ConfigError("/initial_condition/type: unsupported");
}

double mass_outside_quarter_box(const PhysicalField& rho) {
    const GridSpec& g = rho.grid();
    const int N = g.points_per_axis;
    const double q = 0.25 * g.side_length;
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        std::size_t rest = i;
        bool out = false;
        for (int a = 0; a < g.n; ++a) {
            out = out || std::abs(g.coordinate(static_cast<int>(rest % N))) > q;
            rest /= N;
        }
        double v = std::abs(rho[i]);
        total += v;
        if (out)
            outside += v;
    }
    return total > 0.0 ? outside / total : 0.0;
}

}  // namespace fks
