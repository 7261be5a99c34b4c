#include "nflow/config.hpp"

#include "nflow/errors.hpp"
#include "nflow/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace nflow {

namespace {

const std::vector<std::pair<Mode, std::string>>& mode_names() {
    static const std::vector<std::pair<Mode, std::string>> names = {
        {Mode::Solve, "solve"},          {Mode::Certify, "certify"},
        {Mode::Stability, "stability"},  {Mode::BV, "bv"},
        {Mode::ListPotentials, "list-potentials"}, {Mode::Validate, "validate"}};
    return names;
}

} // namespace

std::string to_string(Mode mode) {
    for (const auto& [m, n] : mode_names())
        if (m == mode) return n;
    return "unknown";
}

Mode parse_mode(const std::string& name) {
    std::vector<std::string> all;
    for (const auto& [m, n] : mode_names()) {
        if (n == name) return m;
        all.push_back(n);
    }
    throw ArgumentError("unknown mode '" + name + "' (did you mean '" + nearest_name(name, all) + "'?)");
}

std::string to_string(const Diagnostic& d) {
    std::ostringstream os;
    if (d.line > 0) os << "line " << d.line << ": ";
    if (!d.field.empty()) os << d.field << ": ";
    os << d.message;
    return os.str();
}

// ---------------------------------------------------------------------------
// catalogs

const std::vector<std::string>& phi_catalog() {
    static const std::vector<std::string> c = {"zero", "quadratic", "l1", "box", "enet"};
    return c;
}

const std::vector<std::string>& psi_catalog() {
    static const std::vector<std::string> c = {"zero", "quadratic", "qform", "lsq", "logistic"};
    return c;
}

const std::vector<std::string>& schedule_catalog() {
    static const std::vector<std::string> c = {"constant", "exp_decay", "rational", "piecewise_linear"};
    return c;
}

namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

// parameter names accepted by each descriptor
const std::vector<std::string>& phi_params(const std::string& name) {
    static const std::map<std::string, std::vector<std::string>> p = {
        {"zero", {}}, {"quadratic", {"alpha"}}, {"l1", {"w"}}, {"box", {"lo", "hi"}}, {"enet", {"w", "alpha"}}};
    return p.at(name);
}

const std::vector<std::string>& psi_params(const std::string& name) {
    static const std::map<std::string, std::vector<std::string>> p = {{"zero", {}},
                                                                      {"quadratic", {"alpha", "center"}},
                                                                      {"qform", {"Q", "b", "offset"}},
                                                                      {"lsq", {"A", "b"}},
                                                                      {"logistic", {"A", "y"}}};
    return p.at(name);
}

} // namespace

std::string nearest_name(const std::string& name, const std::vector<std::string>& catalog) {
    std::string best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (const auto& c : catalog) {
        const auto d = edit_distance(name, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

Descriptor parse_descriptor(const std::string& text) {
    Descriptor d;
    const auto colon = text.find(':');
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    d.name = trim(text.substr(0, colon));
    if (d.name.empty()) throw ArgumentError("descriptor '" + text + "' has no name");
    if (colon == std::string::npos) return d;
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        if (trim(item).empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("descriptor '" + text + "': parameter '" + trim(item) + "' needs key=value");
        const std::string key = trim(item.substr(0, eq));
        if (key.empty()) throw ArgumentError("descriptor '" + text + "': empty parameter name");
        if (d.params.count(key)) throw ArgumentError("descriptor '" + text + "': parameter '" + key + "' repeated");
        d.params[key] = trim(item.substr(eq + 1));
    }
    return d;
}

// ---------------------------------------------------------------------------
// YAML parsing

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

double to_double(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw ConfigError(field + " must be a number", line_of(n));
    const std::string s = n.Scalar();
    // YAML spellings of infinity
    if (s == ".inf" || s == "+.inf" || s == ".Inf") return std::numeric_limits<double>::infinity();
    if (s == "-.inf" || s == "-.Inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (!s.empty() && *b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw ConfigError(field + " must be a number, got '" + s + "'", line_of(n));
    return v;
}

long to_long(const YAML::Node& n, const std::string& field) {
    const double v = to_double(n, field);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw ConfigError(field + " must be an integer", line_of(n));
    return static_cast<long>(v);
}

std::string to_str(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw ConfigError(field + " must be a string", line_of(n));
    return n.Scalar();
}

struct RawVector {
    std::vector<double> values;
    bool scalar = false;
    bool present = false;
    int line = 0;
};

RawVector to_raw_vector(const YAML::Node& n, const std::string& field) {
    RawVector r;
    r.present = true;
    r.line = line_of(n);
    if (n.IsScalar()) {
        r.scalar = true;
        r.values.push_back(to_double(n, field));
    } else if (n.IsSequence()) {
        for (std::size_t i = 0; i < n.size(); ++i)
            r.values.push_back(to_double(n[i], field + "[" + std::to_string(i) + "]"));
    } else {
        throw ConfigError(field + " must be a number or a list of numbers", r.line);
    }
    return r;
}

Vector expand(const RawVector& r, Eigen::Index n) {
    if (!r.present) return Vector();
    if (r.scalar) return Vector::Constant(n, r.values.front());
    return Eigen::Map<const Vector>(r.values.data(), static_cast<Eigen::Index>(r.values.size()));
}

class Reader {
public:
    explicit Reader(ExperimentConfig& cfg) : cfg_(cfg) {}

    // Records lines and reports keys outside `known` as diagnostics.
    void keys(const YAML::Node& map, const std::string& prefix, const std::vector<std::string>& known) {
        if (!map.IsMap()) throw ConfigError((prefix.empty() ? "config" : prefix) + " must be a mapping", line_of(map));
        for (const auto& kv : map) {
            const std::string key = kv.first.Scalar();
            const std::string field = prefix.empty() ? key : prefix + "." + key;
            cfg_.lines[field] = line_of(kv.first);
            if (std::find(known.begin(), known.end(), key) == known.end())
                cfg_.parse_diagnostics.push_back(
                    {field, "unknown key (did you mean '" + nearest_name(key, known) + "'?)", line_of(kv.first)});
        }
    }

    Descriptor descriptor(const YAML::Node& n, const std::string& field) {
        Descriptor d;
        if (n.IsScalar()) {
            try {
                d = parse_descriptor(n.Scalar());
            } catch (const ArgumentError& e) {
                throw ConfigError(field + ": " + e.what(), line_of(n));
            }
        } else if (n.IsMap()) {
            if (!n["kind"]) throw ConfigError(field + " needs a 'kind' entry", line_of(n));
            d.name = to_str(n["kind"], field + ".kind");
            for (const auto& kv : n) {
                const std::string key = kv.first.Scalar();
                if (key == "kind") continue;
                d.params[key] = to_str(kv.second, field + "." + key);
            }
        } else {
            throw ConfigError(field + " must be a descriptor string or a mapping", line_of(n));
        }
        d.line = line_of(n);
        return d;
    }

    ScheduleSpec schedule(const YAML::Node& n, const std::string& field) {
        ScheduleSpec s;
        s.line = line_of(n);
        if (n.IsScalar()) {
            s.kind = "constant";
            s.value = to_double(n, field);
            return s;
        }
        keys(n, field, {"kind", "value", "a", "b", "c", "knots"});
        if (!n["kind"]) throw ConfigError(field + " needs a 'kind' entry", line_of(n));
        s.kind = to_str(n["kind"], field + ".kind");
        if (n["value"]) s.value = to_double(n["value"], field + ".value");
        if (n["a"]) s.a = to_double(n["a"], field + ".a");
        if (n["b"]) s.b = to_double(n["b"], field + ".b");
        if (n["c"]) s.c = to_double(n["c"], field + ".c");
        if (const auto k = n["knots"]) {
            if (!k.IsSequence()) throw ConfigError(field + ".knots must be a list of [t, value] pairs", line_of(k));
            for (std::size_t i = 0; i < k.size(); ++i) {
                const std::string f = field + ".knots[" + std::to_string(i) + "]";
                if (!k[i].IsSequence() || k[i].size() != 2) throw ConfigError(f + " must be [t, value]", line_of(k[i]));
                s.knots.emplace_back(to_double(k[i][0], f), to_double(k[i][1], f));
            }
        }
        return s;
    }

    BVPiece piece(const YAML::Node& n, const std::string& field) {
        keys(n, field, {"from", "to", "left_value", "right_value", "shape"});
        BVPiece p;
        for (const char* req : {"from", "to", "left_value"})
            if (!n[req]) throw ConfigError(field + " needs '" + req + "'", line_of(n));
        p.from = to_double(n["from"], field + ".from");
        p.to = to_double(n["to"], field + ".to");
        p.left_value = to_double(n["left_value"], field + ".left_value");
        p.right_value = n["right_value"] ? to_double(n["right_value"], field + ".right_value") : p.left_value;
        p.shape = BVPiece::Shape::Affine;
        if (n["shape"]) {
            const std::string shape = to_str(n["shape"], field + ".shape");
            if (shape == "constant")
                p.shape = BVPiece::Shape::Constant;
            else if (shape != "affine")
                throw ConfigError(field + ".shape must be 'affine' or 'constant'", line_of(n["shape"]));
        }
        return p;
    }

private:
    ExperimentConfig& cfg_;
};

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("syntax error: " + e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    cfg.horizon = std::numeric_limits<double>::quiet_NaN();
    if (!root || root.IsNull()) throw ConfigError("config is empty", 0);
    Reader rd(cfg);
    rd.keys(root, "", {"name", "mode", "problem", "lambda", "integrator", "certificates", "stability", "bv"});

    if (root["name"]) cfg.name = to_str(root["name"], "name");
    if (root["mode"]) {
        const std::string m = to_str(root["mode"], "mode");
        try {
            cfg.mode = parse_mode(m);
        } catch (const ArgumentError& e) {
            cfg.parse_diagnostics.push_back({"mode", e.what(), line_of(root["mode"])});
        }
    }

    RawVector x0, v0, y0, w0;
    std::optional<long> dimension;
    if (const auto p = root["problem"]) {
        rd.keys(p, "problem", {"phi", "psi", "x0", "v0", "T", "dimension", "inf_bound"});
        if (p["phi"]) cfg.phi = rd.descriptor(p["phi"], "problem.phi");
        if (p["psi"]) cfg.psi = rd.descriptor(p["psi"], "problem.psi");
        if (p["x0"]) x0 = to_raw_vector(p["x0"], "problem.x0");
        if (p["v0"]) v0 = to_raw_vector(p["v0"], "problem.v0");
        if (p["T"]) cfg.horizon = to_double(p["T"], "problem.T");
        if (p["dimension"]) dimension = to_long(p["dimension"], "problem.dimension");
        if (p["inf_bound"]) cfg.inf_bound = to_double(p["inf_bound"], "problem.inf_bound");
    }
    if (root["lambda"]) cfg.lambda = rd.schedule(root["lambda"], "lambda");

    if (const auto n = root["integrator"]) {
        rd.keys(n, "integrator", {"rtol", "atol", "h0", "hmax", "max_steps", "dt"});
        auto& ic = cfg.integrator;
        if (n["rtol"]) ic.rtol = to_double(n["rtol"], "integrator.rtol");
        if (n["atol"]) ic.atol = to_double(n["atol"], "integrator.atol");
        if (n["h0"]) ic.h0 = to_double(n["h0"], "integrator.h0");
        if (n["hmax"]) ic.hmax = to_double(n["hmax"], "integrator.hmax");
        if (n["max_steps"]) ic.max_steps = to_long(n["max_steps"], "integrator.max_steps");
        if (n["dt"]) ic.dense_output_dt = to_double(n["dt"], "integrator.dt");
    }
    if (const auto n = root["certificates"]) {
        rd.keys(n, "certificates", {"tolerance"});
        if (n["tolerance"]) cfg.certificate_tolerance = to_double(n["tolerance"], "certificates.tolerance");
    }
    if (const auto n = root["stability"]) {
        rd.keys(n, "stability", {"eta", "y0", "w0"});
        StabilitySpec s;
        if (n["eta"]) s.eta = rd.schedule(n["eta"], "stability.eta");
        else cfg.parse_diagnostics.push_back({"stability.eta", "required", line_of(n)});
        if (n["y0"]) y0 = to_raw_vector(n["y0"], "stability.y0");
        if (n["w0"]) w0 = to_raw_vector(n["w0"], "stability.w0");
        cfg.stability = s;
    }
    if (const auto n = root["bv"]) {
        rd.keys(n, "bv", {"pieces", "levels", "widths", "tolerance"});
        BVSpec b;
        if (const auto ps = n["pieces"]) {
            if (!ps.IsSequence()) throw ConfigError("bv.pieces must be a list", line_of(ps));
            for (std::size_t i = 0; i < ps.size(); ++i) b.pieces.push_back(rd.piece(ps[i], "bv.pieces[" + std::to_string(i) + "]"));
        }
        if (n["levels"]) b.sequence.max_index = static_cast<int>(to_long(n["levels"], "bv.levels"));
        if (const auto ws = n["widths"]) {
            const auto r = to_raw_vector(ws, "bv.widths");
            b.sequence.widths = r.values;
        }
        if (n["tolerance"]) b.tolerance = to_double(n["tolerance"], "bv.tolerance");
        cfg.bv = b;
    }

    // dimension: explicit, else the first list given, else 1
    Eigen::Index dim = 1;
    if (dimension) {
        dim = static_cast<Eigen::Index>(*dimension);
    } else {
        for (const RawVector* r : {&x0, &v0, &y0, &w0})
            if (r->present && !r->scalar) {
                dim = static_cast<Eigen::Index>(r->values.size());
                break;
            }
    }
    if (dim < 1) throw ConfigError("problem.dimension must be positive", cfg.lines["problem.dimension"]);
    cfg.x0 = expand(x0, dim);
    cfg.v0 = expand(v0, dim);
    if (cfg.stability) {
        cfg.stability->y0 = y0.present ? expand(y0, dim) : cfg.x0;
        cfg.stability->w0 = w0.present ? expand(w0, dim) : cfg.v0;
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string(), 0);
    std::stringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
    if (cfg.name.empty()) cfg.name = path.stem().string();
    return cfg;
}

// ---------------------------------------------------------------------------
// builders

namespace {

double param_number(const Descriptor& d, const std::string& key, double fallback) {
    const auto it = d.params.find(key);
    if (it == d.params.end()) return fallback;
    const std::string& s = it->second;
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ArgumentError("parameter '" + key + "' of '" + d.name + "' must be a number, got '" + s + "'");
    return v;
}

std::filesystem::path param_path(const ExperimentConfig& cfg, const Descriptor& d, const std::string& key) {
    const auto it = d.params.find(key);
    if (it == d.params.end()) throw ArgumentError("'" + d.name + "' needs parameter '" + key + "'");
    std::filesystem::path p = it->second;
    return p.is_absolute() ? p : cfg.base_dir / p;
}

void check_params(const Descriptor& d, const std::vector<std::string>& allowed) {
    for (const auto& [k, v] : d.params)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ArgumentError("'" + d.name + "' has no parameter '" + k + "'" +
                                (allowed.empty() ? "" : " (did you mean '" + nearest_name(k, allowed) + "'?)"));
}

void check_known(const std::string& what, const std::string& name, const std::vector<std::string>& catalog) {
    if (std::find(catalog.begin(), catalog.end(), name) == catalog.end())
        throw ArgumentError("unknown " + what + " '" + name + "' (did you mean '" + nearest_name(name, catalog) + "'?)");
}

Eigen::Index dim_of(const ExperimentConfig& cfg) {
    if (cfg.x0.size() == 0) throw ArgumentError("problem.x0 is required");
    return cfg.x0.size();
}

} // namespace

PotentialPhi build_phi(const ExperimentConfig& cfg) {
    const auto& d = cfg.phi;
    check_known("phi potential", d.name, phi_catalog());
    check_params(d, phi_params(d.name));
    const auto n = dim_of(cfg);
    if (d.name == "zero") return PotentialPhi(phi_kind::Zero{}, n);
    if (d.name == "quadratic") return PotentialPhi(phi_kind::Quadratic{param_number(d, "alpha", 1.0)}, n);
    if (d.name == "l1") return PotentialPhi(phi_kind::L1{param_number(d, "w", 1.0)}, n);
    if (d.name == "box") return PotentialPhi(phi_kind::Box{param_number(d, "lo", 0.0), param_number(d, "hi", 1.0)}, n);
    return PotentialPhi(phi_kind::ElasticNet{param_number(d, "w", 1.0), param_number(d, "alpha", 1.0)}, n);
}

PotentialPsi build_psi(const ExperimentConfig& cfg) {
    const auto& d = cfg.psi;
    check_known("psi potential", d.name, psi_catalog());
    check_params(d, psi_params(d.name));
    const auto n = dim_of(cfg);
    if (d.name == "zero") return PotentialPsi(psi_kind::Zero{}, n);
    if (d.name == "quadratic")
        return PotentialPsi::centered_quadratic(param_number(d, "alpha", 1.0),
                                                Vector::Constant(n, param_number(d, "center", 0.0)));
    if (d.name == "qform") {
        psi_kind::QuadraticForm q{io::read_matrix(param_path(cfg, d, "Q")), Vector::Zero(n),
                                  param_number(d, "offset", 0.0)};
        if (d.params.count("b")) q.b = io::read_vector(param_path(cfg, d, "b"));
        return PotentialPsi(std::move(q), n);
    }
    if (d.name == "lsq")
        return PotentialPsi(psi_kind::LeastSquares{io::read_matrix(param_path(cfg, d, "A")),
                                                   io::read_vector(param_path(cfg, d, "b"))},
                            n);
    return PotentialPsi(psi_kind::LogisticSum{io::read_matrix(param_path(cfg, d, "A")),
                                              io::read_vector(param_path(cfg, d, "y"))},
                        n);
}

PotentialPair build_pair(const ExperimentConfig& cfg) {
    return PotentialPair(build_phi(cfg), build_psi(cfg), cfg.inf_bound);
}

LambdaSchedule build_schedule(const ScheduleSpec& s) {
    check_known("schedule kind", s.kind, schedule_catalog());
    if (s.kind == "constant") return LambdaSchedule::constant(s.value);
    if (s.kind == "exp_decay") return LambdaSchedule::exponential_decay(s.a, s.b, s.c);
    if (s.kind == "rational") return LambdaSchedule::rational(s.c);
    return LambdaSchedule::piecewise_linear(s.knots);
}

BVSchedule build_bv_schedule(const BVSpec& spec) { return BVSchedule(spec.pieces); }

// ---------------------------------------------------------------------------
// validation

std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
    std::vector<Diagnostic> out = cfg.parse_diagnostics;
    auto line = [&](const std::string& field) {
        const auto it = cfg.lines.find(field);
        return it == cfg.lines.end() ? 0 : it->second;
    };
    auto add = [&](const std::string& field, const std::string& msg, int ln = -1) {
        out.push_back({field, msg, ln < 0 ? line(field) : ln});
    };

    if (std::isnan(cfg.horizon))
        add("problem.T", "required");
    else if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
        add("problem.T", "must be a positive finite number");

    if (cfg.x0.size() == 0) add("problem.x0", "required");
    if (cfg.v0.size() == 0) add("problem.v0", "required");
    const auto n = cfg.x0.size();
    auto check_vec = [&](const Vector& v, const std::string& field) {
        if (v.size() == 0) return;
        if (n > 0 && v.size() != n) {
            std::ostringstream os;
            os << "has " << v.size() << " entries but x0 has " << n;
            add(field, os.str());
        }
        if (!v.allFinite()) add(field, "entries must be finite");
    };
    check_vec(cfg.x0, "problem.x0");
    check_vec(cfg.v0, "problem.v0");

    if (n > 0) {
        bool phi_ok = false, psi_ok = false;
        try {
            build_phi(cfg);
            phi_ok = true;
        } catch (const std::exception& e) {
            add("problem.phi", e.what(), cfg.phi.line);
        }
        try {
            build_psi(cfg);
            psi_ok = true;
        } catch (const std::exception& e) {
            add("problem.psi", e.what(), cfg.psi.line);
        }
        if (phi_ok && psi_ok) {
            try {
                build_pair(cfg);
            } catch (const std::exception& e) {
                add("problem", e.what());
            }
        }
    }

    const bool horizon_ok = cfg.horizon > 0.0 && std::isfinite(cfg.horizon);
    auto check_schedule = [&](const ScheduleSpec& s, const std::string& field) {
        try {
            const auto l = build_schedule(s);
            if (horizon_ok && !(l.c0(cfg.horizon) > 0.0)) add(field, "must stay positive on [0, T]", s.line);
        } catch (const std::exception& e) {
            add(field, e.what(), s.line);
        }
    };
    if (!(cfg.mode == Mode::BV && cfg.bv)) check_schedule(cfg.lambda, "lambda");

    try {
        cfg.integrator.validate();
    } catch (const std::exception& e) {
        add("integrator", e.what());
    }
    if (!(cfg.certificate_tolerance > 0.0) || !std::isfinite(cfg.certificate_tolerance))
        add("certificates.tolerance", "must be a positive finite number");

    if (cfg.mode == Mode::Stability && !cfg.stability) add("stability", "required in stability mode", 0);
    if (cfg.stability) {
        check_schedule(cfg.stability->eta, "stability.eta");
        check_vec(cfg.stability->y0, "stability.y0");
        check_vec(cfg.stability->w0, "stability.w0");
    }

    if (cfg.mode == Mode::BV && !cfg.bv) add("bv", "required in bv mode", 0);
    if (cfg.bv) {
        try {
            const auto b = build_bv_schedule(*cfg.bv);
            if (horizon_ok && std::abs(b.horizon() - cfg.horizon) > 1e-12 * std::max(1.0, cfg.horizon))
                add("bv.pieces", "must end at problem.T");
            if (horizon_ok) cfg.bv->sequence.validate(cfg.horizon);
        } catch (const std::exception& e) {
            add("bv", e.what());
        }
        if (!(cfg.bv->tolerance > 0.0)) add("bv.tolerance", "must be positive");
    }
    return out;
}

// ---------------------------------------------------------------------------
// presets

namespace {

const std::vector<std::pair<std::string, std::string>>& presets() {
    static const std::vector<std::pair<std::string, std::string>> p = {
        {"exp-decay", R"(name: exp-decay
mode: certify
# x(t) = exp(-t)
problem:
  phi: zero
  psi: "quadratic:alpha=1"
  x0: 1
  v0: 0
  T: 5
lambda: 1
)"},
        {"half-decay", R"(name: half-decay
mode: certify
# x(t) = exp(-t/2)
problem:
  phi: "quadratic:alpha=1"
  psi: zero
  x0: 1
  v0: 1
  T: 5
lambda: 1
)"},
        {"l1-quadratic", R"(name: l1-quadratic
mode: certify
problem:
  phi: "l1:w=1"
  psi: "quadratic:alpha=1,center=2"
  x0: 1
  v0: 1
  T: 5
lambda:
  kind: rational
  c: 0.1
)"},
        {"l1-quadratic-crossing", R"(name: l1-quadratic-crossing
mode: certify
# x crosses the kink of |x| at the origin and stays there for a while
problem:
  phi: "l1:w=1"
  psi: "quadratic:alpha=1,center=2"
  x0: -1
  v0: -1
  T: 5
lambda:
  kind: rational
  c: 0.1
)"},
        {"stability-scalar", R"(name: stability-scalar
mode: stability
problem:
  phi: "quadratic:alpha=1"
  psi: zero
  x0: 1
  v0: 1
  T: 1
lambda: 1
stability:
  eta: 2
  y0: 1
  w0: 1
)"},
        {"bv-step", R"(name: bv-step
mode: bv
# lambda = 2 on [0, 1), 1 on [1, 2]
problem:
  phi: "quadratic:alpha=1"
  psi: zero
  x0: 1
  v0: 1
  T: 2
bv:
  pieces:
    - {from: 0, to: 1, left_value: 2, right_value: 2, shape: constant}
    - {from: 1, to: 2, left_value: 1, right_value: 1, shape: constant}
  levels: 12
  tolerance: 1.0e-5
)"},
        {"bv-l1-step", R"(name: bv-l1-step
mode: bv
# lambda jumps from 2 to 1 while x is still moving toward the kink at 0
problem:
  phi: "l1:w=1"
  psi: "quadratic:alpha=1,center=2"
  x0: -1
  v0: -1
  T: 2
bv:
  pieces:
    - {from: 0, to: 0.3, left_value: 2, right_value: 2, shape: constant}
    - {from: 0.3, to: 2, left_value: 1, right_value: 1, shape: constant}
  levels: 14
  tolerance: 1.0e-5
)"},
    };
    return p;
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : presets()) n.push_back(k);
        return n;
    }();
    return names;
}

const std::string& preset_text(const std::string& name) {
    for (const auto& [k, v] : presets())
        if (k == name) return v;
    throw ArgumentError("unknown preset '" + name + "' (did you mean '" + nearest_name(name, preset_names()) + "'?)");
}

ExperimentConfig load_preset(const std::string& name) { return parse_config(preset_text(name)); }

} // namespace nflow
