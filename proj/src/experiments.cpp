#include "fieldwit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "fieldwit/concurrence.hpp"
#include "fieldwit/cumulant.hpp"
#include "fieldwit/oracle.hpp"
#include "fieldwit/parallel.hpp"

namespace fieldwit {

namespace {

constexpr double kPi = M_PI;

Json geometry_defaults(const std::string& type, int n, double spacing) {
    return {{"type", type},
            {"n", n},
            {"spacing", spacing},
            {"radius", 2.0},
            {"seed", 7},
            {"min_separation", 0.05},
            {"polarization", {0.0, 0.0, 1.0}}};
}

Json state_defaults(const std::string& kind) {
    return {{"kind", kind}, {"lambda", kPi / 3.0}, {"delta", nullptr}, {"phases", nullptr}, {"angles", nullptr}};
}

Json direction_defaults(const std::string& grid, int n) {
    return {{"grid", grid},      {"n", n},          {"n_theta", 64}, {"n_phi", 128},
            {"angles", nullptr}, {"points", nullptr}, {"chi", 0.0}};
}

Json witness_defaults() { return {{"epsilon", nullptr}, {"chi_optimize", false}, {"n_chi", 64}}; }

Json integrator_defaults(double t_max, int samples) {
    return {{"t_max", t_max}, {"samples", samples}, {"rtol", 1e-8}, {"atol", 1e-10}};
}

// Kinds of JSON values that may replace one another.
int kind_of(const Json& v) {
    if (v.is_number()) return 0;
    if (v.is_string()) return 1;
    if (v.is_boolean()) return 2;
    if (v.is_array()) return 3;
    if (v.is_object()) return 4;
    return 5;
}

void merge_at(Json& base, const Json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError("'" + (path.empty() ? "config" : path) + "' must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown key '" + key + "'");
        Json& slot = base[it.key()];
        if (slot.is_object()) {
            merge_at(slot, it.value(), key);
        } else if (slot.is_null() || it.value().is_null() || kind_of(slot) == kind_of(it.value())) {
            slot = it.value();
        } else {
            throw ConfigError("key '" + key + "' expects a " + std::string(slot.type_name()) + ", got " +
                              it.value().type_name());
        }
    }
}

// Typed lookup with configuration errors instead of JSON exceptions.
template <class T>
T get(const Json& config, const std::string& dotted) {
    const Json* node = &config;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!node->is_object() || !node->contains(part)) throw ConfigError("missing key '" + dotted + "'");
        node = &(*node)[part];
    }
    try {
        return node->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("key '" + dotted + "' has the wrong type");
    }
}

const Json& node(const Json& config, const std::string& dotted) {
    const Json* n = &config;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!n->is_object() || !n->contains(part)) throw ConfigError("missing key '" + dotted + "'");
        n = &(*n)[part];
    }
    return *n;
}

int positive_int(const Json& config, const std::string& dotted, int min_value = 1) {
    const Json& v = node(config, dotted);
    if (!v.is_number_integer()) throw ConfigError("key '" + dotted + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > std::numeric_limits<int>::max()) {
        throw ConfigError("key '" + dotted + "' must be at least " + std::to_string(min_value));
    }
    return static_cast<int>(x);
}

double finite(const Json& config, const std::string& dotted) {
    const double v = get<double>(config, dotted);
    if (!std::isfinite(v)) throw ConfigError("key '" + dotted + "' must be finite");
    return v;
}

double positive(const Json& config, const std::string& dotted) {
    const double v = finite(config, dotted);
    if (!(v > 0.0)) throw ConfigError("key '" + dotted + "' must be positive");
    return v;
}

Vec3 polarization(const Json& config) {
    const auto p = get<std::vector<double>>(config, "geometry.polarization");
    if (p.size() != 3) throw ConfigError("geometry.polarization needs three components");
    const Vec3 v(p[0], p[1], p[2]);
    if (!(v.norm() > 0.0)) throw ConfigError("geometry.polarization must be nonzero");
    return v.normalized();
}

double epsilon_for(const Json& config, int n) {
    const Json& e = node(config, "witness.epsilon");
    if (e.is_null()) return detection_epsilon(n);
    const double v = get<double>(config, "witness.epsilon");
    if (!(v >= 0.0)) throw ConfigError("witness.epsilon must be nonnegative");
    return v;
}

SweepOptions sweep_options(const Json& config) {
    SweepOptions o;
    o.optimize_chi = get<bool>(config, "witness.chi_optimize");
    o.n_chi = positive_int(config, "witness.n_chi");
    return o;
}

DecayConvention convention(const Json& config) {
    const auto c = get<std::string>(config, "convention");
    if (c == "standard") return DecayConvention::standard;
    if (c == "literal") return DecayConvention::literal;
    throw ConfigError("convention must be 'standard' or 'literal'");
}

Cell num(double v) { return v; }
Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }
Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

const std::vector<std::string> kWitnessColumns{"w1", "w2", "w3_X", "w3_Y", "w3_Z", "w4_X", "w4_Y", "w4_Z"};

void append_witnesses(std::vector<Cell>& row, const WitnessReport& r) {
    for (double v : r.values()) row.emplace_back(v);
    row.emplace_back(r.w_min);
}

std::string cell_text(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(long v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

std::optional<double> cell_number(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* l = std::get_if<long>(&c)) return static_cast<double>(*l);
    return std::nullopt;
}

std::string svg_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"fig1-sphere", "dicke-sweep", "decay", "cumulant-tent", "fuzz"};
    return names;
}

Json default_config(std::string_view command) {
    if (command == "fig1-sphere") {
        return {{"geometry", geometry_defaults("chain", 3, 0.3)},
                {"state", state_defaults("eq5")},
                {"directions", direction_defaults("sphere", 64)},
                {"witness", witness_defaults()}};
    }
    if (command == "dicke-sweep") {
        return {{"geometry", geometry_defaults("chain", 100, kPi / 2.0)},
                {"state", state_defaults("dicke")},
                {"directions", direction_defaults("plane", 512)},
                {"witness", witness_defaults()},
                {"analysis", {{"reference_theta", kPi / 2.0}, {"exclude_halfwidth", 0.01}}}};
    }
    if (command == "decay") {
        return {{"geometry", geometry_defaults("chain", 8, 0.3)},
                {"state", state_defaults("excited")},
                {"directions", direction_defaults("plane", 64)},
                {"witness", witness_defaults()},
                {"integrator", integrator_defaults(12.0, 241)},
                {"convention", "standard"},
                {"concurrence", {{"enabled", true}, {"threshold", 1e-3}}}};
    }
    if (command == "cumulant-tent") {
        Json dirs = direction_defaults("plane-angles", 1);
        dirs["angles"] = {0.45 * kPi};
        return {{"geometry", {{"type", "chain"}, {"polarization", {0.0, 0.0, 1.0}}}},
                {"state", state_defaults("antisym")},
                {"directions", dirs},
                {"witness", witness_defaults()},
                {"integrator", integrator_defaults(2.0, 201)},
                {"convention", "standard"},
                {"cumulant",
                 {{"n_list", {4, 8, 12, 16}}, {"kd_list", {0.2, 0.3, 0.5, 0.8}}, {"blowup_limit", 10.0}}}};
    }
    if (command == "fuzz") {
        return {{"fuzz",
                 {{"n_min", 2},
                  {"n_max", 6},
                  {"l_min", 1},
                  {"l_max", 4},
                  {"trials", 10000},
                  {"dirs_per_trial", 4},
                  {"chi_per_trial", 4},
                  {"seed", 1},
                  {"radius_min", 0.5},
                  {"radius_max", 3.0},
                  {"violation_threshold", -1e-9},
                  {"controls", Json::array()}}}};
    }
    throw ConfigError("unknown subcommand '" + std::string(command) + "'");
}

Json merge_config(const Json& defaults, const Json& user) {
    Json out = defaults;
    if (user.is_null()) return out;
    merge_at(out, user, "");
    return out;
}

Json apply_overrides(Json config, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not of the form key=value");
        const std::string path = o.substr(0, eq);
        const std::string text = o.substr(eq + 1);
        Json value;
        try {
            value = Json::parse(text);
        } catch (const nlohmann::json::exception&) {
            value = text;
        }
        // Build the nested single-key document and merge it.
        std::vector<std::string> parts;
        std::stringstream ss(path);
        std::string part;
        while (std::getline(ss, part, '.')) {
            if (part.empty()) throw ConfigError("override '" + o + "' has an empty path segment");
            parts.push_back(part);
        }
        Json doc = value;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) doc = Json{{*it, doc}};
        merge_at(config, doc, "");
    }
    return config;
}

Json resolve_config(std::string_view command, const Json& user, const std::vector<std::string>& overrides) {
    return apply_overrides(merge_config(default_config(command), user), overrides);
}

AtomConfig build_geometry(const Json& config) {
    const auto type = get<std::string>(config, "geometry.type");
    const int n = positive_int(config, "geometry.n");
    const Vec3 pol = polarization(config);
    try {
        if (type == "chain") return chain(n, positive(config, "geometry.spacing"), pol);
        if (type == "cloud") {
            CloudOptions o;
            o.min_separation = get<double>(config, "geometry.min_separation");
            if (!(o.min_separation >= 0.0)) throw ConfigError("geometry.min_separation must be nonnegative");
            o.polarization = pol;
            return spherical_cloud(n, positive(config, "geometry.radius"), get<std::uint64_t>(config, "geometry.seed"),
                                   o);
        }
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }
    throw ConfigError("geometry.type must be 'chain' or 'cloud'");
}

std::vector<Direction> build_directions(const Json& config) {
    const auto grid = get<std::string>(config, "directions.grid");
    const double chi = finite(config, "directions.chi");
    std::vector<Direction> dirs;
    if (grid == "sphere") {
        dirs = sphere_grid(positive_int(config, "directions.n_theta"), positive_int(config, "directions.n_phi"));
    } else if (grid == "plane") {
        dirs = plane_sweep(positive_int(config, "directions.n"));
    } else if (grid == "plane-angles") {
        const Json& a = node(config, "directions.angles");
        if (!a.is_array() || a.empty()) throw ConfigError("directions.angles must be a nonempty list");
        for (double t : get<std::vector<double>>(config, "directions.angles")) dirs.push_back(Direction::in_plane(t));
    } else if (grid == "sphere-points") {
        const Json& p = node(config, "directions.points");
        if (!p.is_array() || p.empty()) throw ConfigError("directions.points must be a nonempty list of [theta, phi]");
        for (const auto& pt : get<std::vector<std::vector<double>>>(config, "directions.points")) {
            if (pt.size() != 2) throw ConfigError("each direction point is [theta, phi]");
            dirs.push_back(Direction::spherical(pt[0], pt[1]));
        }
    } else {
        throw ConfigError("directions.grid must be sphere, plane, plane-angles or sphere-points");
    }
    for (auto& d : dirs) d.chi = chi;
    return dirs;
}

std::vector<BlochAngles> build_product_angles(const Json& config, int n) {
    const auto kind = get<std::string>(config, "state.kind");
    if (kind == "excited") return std::vector<BlochAngles>(static_cast<std::size_t>(n), BlochAngles{0.0, 0.0});
    if (kind == "ground") return std::vector<BlochAngles>(static_cast<std::size_t>(n), BlochAngles{kPi, 0.0});
    if (kind == "antisym") return antisymmetric_angles(n);
    if (kind == "custom-product") {
        const Json& a = node(config, "state.angles");
        if (!a.is_array()) throw ConfigError("state.angles must be a list of [theta, phi]");
        const auto pairs = get<std::vector<std::vector<double>>>(config, "state.angles");
        if (static_cast<int>(pairs.size()) != n) throw ConfigError("state.angles needs one [theta, phi] per atom");
        std::vector<BlochAngles> out;
        for (const auto& p : pairs) {
            if (p.size() != 2) throw ConfigError("each state angle is [theta, phi]");
            out.push_back({p[0], p[1]});
        }
        return out;
    }
    throw ConfigError("state.kind '" + kind + "' is not a product state");
}

DickeSpec build_dicke(const Json& config, int n) {
    const Json& phases = node(config, "state.phases");
    if (!phases.is_null()) {
        const auto p = get<std::vector<double>>(config, "state.phases");
        if (static_cast<int>(p.size()) != n) throw ConfigError("state.phases needs one phase per atom");
        return DickeSpec{p};
    }
    const Json& delta = node(config, "state.delta");
    if (delta.is_null() || (delta.is_string() && delta.get<std::string>() == "auto")) {
        return DickeSpec::chebyshev(n, chebyshev_delta(n));
    }
    const double d = get<double>(config, "state.delta");
    if (!(d > -1.0 && d < 1.0)) throw ConfigError("state.delta must lie in (-1, 1)");
    return DickeSpec::chebyshev(n, d);
}

DensityMatrix build_density(const Json& config, int n) {
    const auto kind = get<std::string>(config, "state.kind");
    if (n > kMaxExactAtoms) {
        throw ConfigError("exact states are limited to " + std::to_string(kMaxExactAtoms) + " atoms");
    }
    if (kind == "mixed") return DensityMatrix::maximally_mixed(n);
    if (kind == "eq5") {
        if (n != 3) throw ConfigError("state.kind 'eq5' needs exactly 3 atoms");
        return DensityMatrix::from_pure(three_atom_state(finite(config, "state.lambda")));
    }
    if (kind == "dicke") return DensityMatrix::from_pure(dicke_state(build_dicke(config, n)));
    const auto angles = build_product_angles(config, n);
    return DensityMatrix::from_pure(product_state(angles));
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
}

ExperimentResult run_fig1_sphere(const Json& config) {
    const AtomConfig geo = build_geometry(config);
    const int n = geo.n_atoms();
    const SpinCorrelators corr = [&] {
        const auto kind = get<std::string>(config, "state.kind");
        if (kind == "eq5") {
            if (n != 3) throw ConfigError("state.kind 'eq5' needs exactly 3 atoms");
            return correlators(three_atom_state(finite(config, "state.lambda")));
        }
        if (kind == "mixed") return correlators(DensityMatrix::maximally_mixed(n));
        if (n > kMaxExactAtoms) throw ConfigError("exact states are limited to " + std::to_string(kMaxExactAtoms) + " atoms");
        if (kind == "dicke") return correlators(dicke_state(build_dicke(config, n)));
        const auto angles = build_product_angles(config, n);
        return correlators(product_state(angles));
    }();
    const auto dirs = build_directions(config);
    const double eps = epsilon_for(config, n);
    const auto reports = sweep(corr, geo, dirs, sweep_options(config));
    const WitnessReport w0 = spin_squeezing_report(corr);

    ExperimentResult res;
    res.table.header = {"theta", "phi", "chi"};
    for (const auto& c : kWitnessColumns) res.table.header.push_back(c);
    res.table.header.push_back("W");
    long detected = 0;
    for (const auto& r : reports) {
        std::vector<Cell> row{num(r.direction->theta), num(r.direction->phi), num(r.direction->chi)};
        append_witnesses(row, r);
        res.table.rows.push_back(std::move(row));
        if (detects(r, eps)) ++detected;
    }
    const auto best = argmin_report(reports);
    res.summary = {{"W_0", w0.w_min},
                   {"W_0_argmin", w0.argmin},
                   {"epsilon", eps},
                   {"directions", static_cast<long>(reports.size())},
                   {"detected", detected},
                   {"detected_fraction", static_cast<double>(detected) / static_cast<double>(reports.size())},
                   {"W_min", reports[best].w_min},
                   {"W_min_argmin", reports[best].argmin},
                   {"W_min_theta", reports[best].direction->theta},
                   {"W_min_phi", reports[best].direction->phi}};
    return res;
}

ExperimentResult run_dicke_sweep(const Json& config) {
    const AtomConfig geo = build_geometry(config);
    const int n = geo.n_atoms();
    if (get<std::string>(config, "state.kind") != "dicke") throw ConfigError("dicke-sweep needs state.kind 'dicke'");
    const DickeSpec spec = build_dicke(config, n);
    const auto dirs = build_directions(config);
    const double eps = epsilon_for(config, n);
    const double ref = finite(config, "analysis.reference_theta");
    const double halfwidth = finite(config, "analysis.exclude_halfwidth");

    std::vector<WitnessReport> reports(dirs.size());
    std::vector<double> s(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t i) {
        reports[i] = witness_report(dicke_moments(spec, geo, dirs[i]));
        s[i] = s_k(spec, geo, dirs[i]);
    });

    ExperimentResult res;
    res.table.header = {"theta", "S_k"};
    for (const auto& c : kWitnessColumns) res.table.header.push_back(c);
    res.table.header.push_back("W");
    bool all_negative = true;
    double worst_outside = -std::numeric_limits<double>::infinity();
    long outside = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        std::vector<Cell> row{num(dirs[i].theta), num(s[i])};
        append_witnesses(row, reports[i]);
        res.table.rows.push_back(std::move(row));
        if (std::abs(dirs[i].theta - ref) >= halfwidth) {
            ++outside;
            worst_outside = std::max(worst_outside, reports[i].w_min);
            if (!detects(reports[i], eps)) all_negative = false;
        }
    }
    Direction ref_dir = Direction::in_plane(ref, finite(config, "directions.chi"));
    const WitnessReport at_ref = witness_report(dicke_moments(spec, geo, ref_dir));

    double delta = std::numeric_limits<double>::quiet_NaN();
    if (node(config, "state.phases").is_null()) delta = std::cos(spec.phases.front());
    // Zero-sum residual of the phases themselves.
    double cos_sum = 0.0;
    {
        double re = 0.0, im = 0.0;
        for (double p : spec.phases) {
            re += std::cos(p);
            im += std::sin(p);
        }
        cos_sum = re * re + im * im - n;
    }
    res.summary = {{"n_atoms", n},
                   {"delta", std::isnan(delta) ? Json(nullptr) : Json(delta)},
                   {"phase_cos_sum", cos_sum},
                   {"epsilon", eps},
                   {"directions", static_cast<long>(dirs.size())},
                   {"outside_window", outside},
                   {"all_detected_outside_window", all_negative},
                   {"max_W_outside_window", outside > 0 ? Json(worst_outside) : Json(nullptr)},
                   {"reference_theta", ref},
                   {"S_k_at_reference", s_k(spec, geo, ref_dir)},
                   {"w2_at_reference", at_ref.w2},
                   {"w3_Z_at_reference", at_ref.w3[static_cast<std::size_t>(Quadrature::Z)]},
                   {"W_at_reference", at_ref.w_min}};
    return res;
}

ExperimentResult run_decay(const Json& config) {
    const AtomConfig geo = build_geometry(config);
    const int n = geo.n_atoms();
    const DensityMatrix rho0 = build_density(config, n);
    const auto dirs = build_directions(config);
    const double eps = epsilon_for(config, n);
    const SweepOptions sopts = sweep_options(config);
    const auto grid = linear_time_grid(positive(config, "integrator.t_max"), positive_int(config, "integrator.samples", 2));
    IntegrateOptions iopts;
    iopts.rtol = positive(config, "integrator.rtol");
    iopts.atol = positive(config, "integrator.atol");
    const bool with_conc = get<bool>(config, "concurrence.enabled") && n >= 2;
    const double conc_threshold = finite(config, "concurrence.threshold");
    const GreensCouplings c = couplings(geo, convention(config));

    std::vector<double> w(grid.size()), theta(grid.size()), conc(grid.size(), std::nan(""));
    const auto diag = integrate_observed(rho0, c, grid, iopts, [&](std::size_t i, double, const DensityMatrix& rho) {
        const auto reports = sweep(correlators(rho), geo, dirs, sopts);
        const auto best = argmin_report(reports);
        w[i] = reports[best].w_min;
        theta[i] = reports[best].direction->theta;
        if (with_conc) conc[i] = global_concurrence(rho);
    });

    ExperimentResult res;
    res.table.header = {"t", "W_min_over_dirs", "theta_argmin", "C_glob", "trace_drift", "min_eig"};
    std::optional<double> t_conc;
    double max_drift = 0.0, min_eig = std::numeric_limits<double>::infinity(), max_herm = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        res.table.rows.push_back({num(diag.times[i]), num(w[i]), num(theta[i]),
                                  with_conc ? Cell(conc[i]) : Cell(), num(diag.trace_drift[i]),
                                  num(diag.min_eigenvalue[i])});
        if (with_conc && !t_conc && conc[i] > conc_threshold) t_conc = diag.times[i];
        max_drift = std::max(max_drift, diag.trace_drift[i]);
        min_eig = std::min(min_eig, diag.min_eigenvalue[i]);
        max_herm = std::max(max_herm, diag.hermiticity_error[i]);
    }
    res.summary = {{"n_atoms", n},
                   {"epsilon", eps},
                   {"t_ent", opt_json(detect_t_ent(grid, w, eps))},
                   {"t_concurrence", opt_json(t_conc)},
                   {"concurrence_threshold", conc_threshold},
                   {"max_trace_drift", max_drift},
                   {"min_eigenvalue", min_eig},
                   {"max_hermiticity_error", max_herm},
                   {"steps_accepted", diag.stats.accepted},
                   {"steps_rejected", diag.stats.rejected},
                   {"rhs_calls", diag.stats.rhs_calls}};
    return res;
}

ExperimentResult run_cumulant_tent(const Json& config) {
    const auto type = get<std::string>(config, "geometry.type");
    if (type != "chain") throw ConfigError("cumulant-tent supports geometry.type 'chain' only");
    const Vec3 pol = polarization(config);
    const auto n_list = get<std::vector<int>>(config, "cumulant.n_list");
    const auto kd_list = get<std::vector<double>>(config, "cumulant.kd_list");
    if (n_list.empty() || kd_list.empty()) throw ConfigError("cumulant.n_list and cumulant.kd_list must be nonempty");
    for (int n : n_list) {
        if (n < 1) throw ConfigError("cumulant.n_list entries must be positive");
    }
    for (double kd : kd_list) {
        if (!(kd > 0.0)) throw ConfigError("cumulant.kd_list entries must be positive");
    }
    const auto dirs = build_directions(config);
    const auto grid = linear_time_grid(positive(config, "integrator.t_max"), positive_int(config, "integrator.samples", 2));
    CumulantOptions copts;
    copts.rtol = positive(config, "integrator.rtol");
    copts.atol = positive(config, "integrator.atol");
    copts.blowup_limit = positive(config, "cumulant.blowup_limit");
    const DecayConvention conv = convention(config);
    const SweepOptions base = sweep_options(config);
    // Validate the state block once up front.
    (void)build_product_angles(config, n_list.front());

    struct CellResult {
        int n = 0;
        double kd = 0.0;
        std::optional<double> t_ent;
        std::string status;
        std::string detail;
    };
    std::vector<CellResult> cells;
    for (int n : n_list)
        for (double kd : kd_list) cells.push_back({n, kd, std::nullopt, "", ""});

    parallel_for(cells.size(), [&](std::size_t i) {
        auto& cell = cells[i];
        const AtomConfig geo = chain(cell.n, cell.kd, pol);
        const auto angles = build_product_angles(config, cell.n);
        const GreensCouplings c = couplings(geo, conv);
        const double eps = epsilon_for(config, cell.n);
        SweepOptions sopts = base;
        sopts.workers = 1;
        std::vector<double> w;
        std::vector<double> times;
        try {
            integrate_cumulant_observed(init_from_product(angles), c, grid, copts,
                                        [&](std::size_t, double t, const CumulantState& s) {
                                            const auto reports = sweep(s, geo, dirs, sopts);
                                            w.push_back(reports[argmin_report(reports)].w_min);
                                            times.push_back(t);
                                        });
            cell.t_ent = detect_t_ent(times, w, eps);
            cell.status = cell.t_ent ? "detected" : "not_detected";
        } catch (const NumericalError& e) {
            // Detection before the closure broke down still counts.
            if (!times.empty()) cell.t_ent = detect_t_ent(times, w, eps);
            cell.status = "blowup";
            cell.detail = e.what();
        }
    });

    ExperimentResult res;
    res.table.header = {"n", "kd", "t_ent", "status"};
    Json summary_cells = Json::array();
    long blowups = 0, detected = 0;
    for (const auto& cell : cells) {
        res.table.rows.push_back({Cell(static_cast<long>(cell.n)), num(cell.kd), opt(cell.t_ent), Cell(cell.status)});
        if (cell.status == "blowup") ++blowups;
        if (cell.t_ent) ++detected;
        Json j = {{"n", cell.n}, {"kd", cell.kd}, {"t_ent", opt_json(cell.t_ent)}, {"status", cell.status}};
        if (!cell.detail.empty()) j["detail"] = cell.detail;
        summary_cells.push_back(j);
    }
    res.summary = {{"cells", summary_cells}, {"detected", detected}, {"blowups", blowups}};
    return res;
}

ExperimentResult run_fuzz(const Json& config) {
    FuzzOptions o;
    o.n_min = positive_int(config, "fuzz.n_min");
    o.n_max = positive_int(config, "fuzz.n_max");
    o.l_min = positive_int(config, "fuzz.l_min");
    o.l_max = positive_int(config, "fuzz.l_max");
    o.trials = positive_int(config, "fuzz.trials");
    o.dirs_per_trial = positive_int(config, "fuzz.dirs_per_trial");
    o.chi_per_trial = positive_int(config, "fuzz.chi_per_trial");
    o.seed = get<std::uint64_t>(config, "fuzz.seed");
    o.radius_min = positive(config, "fuzz.radius_min");
    o.radius_max = positive(config, "fuzz.radius_max");
    o.violation_threshold = finite(config, "fuzz.violation_threshold");
    if (o.n_max < o.n_min) throw ConfigError("fuzz.n_max must be at least fuzz.n_min");
    if (o.n_max > kMaxExactAtoms) throw ConfigError("fuzz.n_max exceeds the exact-state cap");
    if (o.l_max < o.l_min) throw ConfigError("fuzz.l_max must be at least fuzz.l_min");
    if (o.radius_max < o.radius_min) throw ConfigError("fuzz.radius_max must be at least fuzz.radius_min");

    for (const auto& name : get<std::vector<std::string>>(config, "fuzz.controls")) {
        if (name == "bell") {
            // (|ud> + |du>)/sqrt 2 observed perpendicular to the pair: all optical phases vanish.
            CVector a = CVector::Zero(4);
            a(1) = a(2) = 1.0 / std::sqrt(2.0);
            const AtomConfig geo({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {Vec3::UnitZ(), Vec3::UnitZ()});
            o.controls.push_back({"bell", DensityMatrix::from_pure(PureState(a, 2)), geo, {Direction::spherical(0.0, 0.0)}});
        } else if (name == "ground") {
            for (int n = o.n_min; n <= o.n_max; ++n) {
                const std::vector<BlochAngles> down(static_cast<std::size_t>(n), BlochAngles{kPi, 0.0});
                const AtomConfig geo = spherical_cloud(n, o.radius_max, o.seed + static_cast<std::uint64_t>(n));
                o.controls.push_back({"ground", DensityMatrix::from_pure(product_state(down)), geo,
                                      sphere_grid(4, 5)});
            }
        } else {
            throw ConfigError("fuzz.controls entries must be 'bell' or 'ground'");
        }
    }
    ExperimentResult res;
    res.summary = to_json(fuzz_witnesses(o));
    return res;
}

ExperimentResult run_experiment(std::string_view command, const Json& config) {
    if (command == "fig1-sphere") return run_fig1_sphere(config);
    if (command == "dicke-sweep") return run_dicke_sweep(config);
    if (command == "decay") return run_decay(config);
    if (command == "cumulant-tent") return run_cumulant_tent(config);
    if (command == "fuzz") return run_fuzz(config);
    throw ConfigError("unknown subcommand '" + std::string(command) + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const std::string& command, const Json& config, const ExperimentResult& result) {
    out << "# fieldwit " << command << "\n# config:\n";
    std::stringstream cfg(config.dump(2));
    for (std::string line; std::getline(cfg, line);) out << "#   " << line << '\n';
    out << "# summary:\n";
    std::stringstream sum(result.summary.dump(2));
    for (std::string line; std::getline(sum, line);) out << "#   " << line << '\n';
    for (std::size_t i = 0; i < result.table.header.size(); ++i) {
        out << (i ? "," : "") << result.table.header[i];
    }
    out << '\n';
    for (const auto& row : result.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

void write_svg_plot(std::ostream& out, const Table& table, std::string_view x_column, std::string_view y_column,
                    const std::string& title) {
    const auto xi = table.column(x_column), yi = table.column(y_column);
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : table.rows) {
        const auto x = cell_number(row[xi]), y = cell_number(row[yi]);
        if (x && y && std::isfinite(*x) && std::isfinite(*y)) pts.emplace_back(*x, *y);
    }
    const double w = 640, h = 400, m = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!pts.empty()) {
        x0 = x1 = pts[0].first;
        y0 = y1 = pts[0].second;
        for (const auto& [x, y] : pts) {
            x0 = std::min(x0, x), x1 = std::max(x1, x);
            y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
        y0 = std::min(y0, 0.0), y1 = std::max(y1, 0.0);
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
    auto py = [&](double y) { return h - m - (y - y0) / (y1 - y0) * (h - 2 * m); };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title)
        << "</text>\n"
        << "<line x1=\"" << m << "\" y1=\"" << py(0) << "\" x2=\"" << w - m << "\" y2=\"" << py(0)
        << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n"
        << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\"" << h - 2 * m
        << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
        << svg_escape(std::string(x_column)) << " [" << format_double(x0) << ", " << format_double(x1)
        << "]</text>\n"
        << "<text x=\"12\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 " << h / 2 << ")\">"
        << svg_escape(std::string(y_column)) << " [" << format_double(y0) << ", " << format_double(y1)
        << "]</text>\n<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n</svg>\n";
}

void write_svg_map(std::ostream& out, const Table& table, std::string_view x_column, std::string_view y_column,
                   std::string_view value_column, const std::string& title) {
    const auto xi = table.column(x_column), yi = table.column(y_column), vi = table.column(value_column);
    std::map<double, int> xs, ys;
    double vmax = 0.0;
    for (const auto& row : table.rows) {
        xs[cell_number(row[xi]).value_or(0.0)] = 0;
        ys[cell_number(row[yi]).value_or(0.0)] = 0;
        vmax = std::max(vmax, std::abs(cell_number(row[vi]).value_or(0.0)));
    }
    int k = 0;
    for (auto& [x, idx] : xs) idx = k++;
    k = 0;
    for (auto& [y, idx] : ys) idx = k++;
    const double w = 640, h = 360, m = 40;
    const double cw = (w - 2 * m) / static_cast<double>(std::max<std::size_t>(xs.size(), 1));
    const double ch = (h - 2 * m) / static_cast<double>(std::max<std::size_t>(ys.size(), 1));
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title)
        << " (red: " << svg_escape(std::string(value_column)) << " &lt; 0, gray: &gt;= 0)</text>\n";
    for (const auto& row : table.rows) {
        const double v = cell_number(row[vi]).value_or(0.0);
        const int cx = xs[cell_number(row[xi]).value_or(0.0)], cy = ys[cell_number(row[yi]).value_or(0.0)];
        const double a = vmax > 0 ? std::min(1.0, std::abs(v) / vmax) : 0.0;
        const int shade = static_cast<int>(255 - 200 * a);
        std::string color = v < 0 ? "rgb(255," + std::to_string(shade) + "," + std::to_string(shade) + ")"
                                  : "rgb(" + std::to_string(shade) + "," + std::to_string(shade) + "," +
                                        std::to_string(shade) + ")";
        out << "<rect x=\"" << m + cx * cw << "\" y=\"" << m + cy * ch << "\" width=\"" << cw + 0.5
            << "\" height=\"" << ch + 0.5 << "\" fill=\"" << color << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace fieldwit
