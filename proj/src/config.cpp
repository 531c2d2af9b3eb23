#include "rbflab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rbflab/errors.hpp"

namespace rbflab::config {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw UsageError("config: unknown key '" + item.key() + "' in " + where);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw UsageError("config: " + where + " must be a number");
    return v.get<double>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const std::exception& err) {
        throw UsageError(std::string("config: invalid JSON: ") + err.what());
    }
    if (!root.is_object()) throw UsageError("config: top level must be an object");
    check_keys(root, "top level",
               {"kernel", "domain", "nodes", "functions", "quadrature", "subsample",
                "spectral", "output", "seed"});

    ExperimentConfig cfg;
    if (root.contains("kernel")) {
        const json& k = root["kernel"];
        check_keys(k, "kernel", {"name", "tau", "lengthscale"});
        if (k.contains("name")) cfg.kernel_name = k["name"].get<std::string>();
        if (k.contains("tau")) cfg.kernel_tau = as_number(k["tau"], "kernel.tau");
        if (k.contains("lengthscale"))
            cfg.kernel_lengthscale = as_number(k["lengthscale"], "kernel.lengthscale");
    }
    if (root.contains("domain")) {
        const json& d = root["domain"];
        check_keys(d, "domain",
                   {"kind", "a", "b", "lo", "hi", "cone_angle", "cone_radius",
                    "grid_resolution"});
        if (d.contains("kind")) cfg.domain_kind = d["kind"].get<std::string>();
        if (cfg.domain_kind != "interval" && cfg.domain_kind != "box" &&
            cfg.domain_kind != "disk")
            throw UsageError("config: domain.kind must be interval, box or disk");
        if (d.contains("a")) cfg.interval_a = as_number(d["a"], "domain.a");
        if (d.contains("b")) cfg.interval_b = as_number(d["b"], "domain.b");
        if (d.contains("lo")) cfg.box_lo = d["lo"].get<std::vector<double>>();
        if (d.contains("hi")) cfg.box_hi = d["hi"].get<std::vector<double>>();
        if (d.contains("cone_angle"))
            cfg.cone_angle = as_number(d["cone_angle"], "domain.cone_angle");
        if (d.contains("cone_radius"))
            cfg.cone_radius = as_number(d["cone_radius"], "domain.cone_radius");
        if (d.contains("grid_resolution"))
            cfg.grid_resolution = as_number(d["grid_resolution"], "domain.grid_resolution");
    }
    if (root.contains("nodes")) {
        const json& n = root["nodes"];
        check_keys(n, "nodes", {"rule", "counts", "greedy_seed"});
        if (n.contains("rule")) cfg.node_rule = n["rule"].get<std::string>();
        if (cfg.node_rule != "equidistant" && cfg.node_rule != "greedy")
            throw UsageError("config: nodes.rule must be equidistant or greedy");
        if (n.contains("counts"))
            for (const json& c : n["counts"])
                cfg.counts.push_back(c.get<Eigen::Index>());
        if (n.contains("greedy_seed"))
            cfg.greedy_seed = n["greedy_seed"].get<std::vector<double>>();
    }
    if (root.contains("functions")) {
        const json& f = root["functions"];
        check_keys(f, "functions", {"family", "omegas"});
        if (f.contains("family") && f["family"].get<std::string>() != "f-omega")
            throw UsageError("config: functions.family must be 'f-omega'");
        if (f.contains("omegas"))
            cfg.omegas = f["omegas"].get<std::vector<double>>();
    }
    if (root.contains("quadrature")) {
        const json& q = root["quadrature"];
        check_keys(q, "quadrature", {"points_per_panel", "grading_levels"});
        if (q.contains("points_per_panel"))
            cfg.quad_points_per_panel = q["points_per_panel"].get<int>();
        if (q.contains("grading_levels"))
            cfg.quad_grading_levels = q["grading_levels"].get<int>();
    }
    if (root.contains("subsample")) {
        const json& s = root["subsample"];
        check_keys(s, "subsample", {"h0", "levels"});
        if (s.contains("h0")) cfg.subsample_h0 = as_number(s["h0"], "subsample.h0");
        if (s.contains("levels")) cfg.subsample_levels = s["levels"].get<int>();
    }
    if (root.contains("spectral")) {
        const json& s = root["spectral"];
        check_keys(s, "spectral", {"rank"});
        if (s.contains("rank")) cfg.spectral_rank = s["rank"].get<Eigen::Index>();
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        check_keys(o, "output", {"dir"});
        if (o.contains("dir")) cfg.output_dir = o["dir"].get<std::string>();
    }
    if (root.contains("seed")) cfg.seed = root["seed"].get<unsigned long>();

    // Config invariants fail at parse time, not at first use.
    kernels::find_kernel(cfg.kernel_name);
    if (cfg.cone_angle.has_value() != cfg.cone_radius.has_value())
        throw UsageError("config: cone_angle and cone_radius must be given together");
    if (!(cfg.grid_resolution > 0.0))
        throw UsageError("config: grid_resolution must be positive");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json root;
    json kernel;
    kernel["name"] = cfg.kernel_name;
    if (cfg.kernel_tau) kernel["tau"] = *cfg.kernel_tau;
    if (cfg.kernel_lengthscale) kernel["lengthscale"] = *cfg.kernel_lengthscale;
    root["kernel"] = kernel;

    json domain;
    domain["kind"] = cfg.domain_kind;
    if (cfg.domain_kind == "interval") {
        domain["a"] = cfg.interval_a;
        domain["b"] = cfg.interval_b;
    } else if (cfg.domain_kind == "box") {
        domain["lo"] = cfg.box_lo;
        domain["hi"] = cfg.box_hi;
    }
    if (cfg.cone_angle) domain["cone_angle"] = *cfg.cone_angle;
    if (cfg.cone_radius) domain["cone_radius"] = *cfg.cone_radius;
    domain["grid_resolution"] = cfg.grid_resolution;
    root["domain"] = domain;

    json nodes;
    nodes["rule"] = cfg.node_rule;
    nodes["counts"] = cfg.counts;
    if (!cfg.greedy_seed.empty()) nodes["greedy_seed"] = cfg.greedy_seed;
    root["nodes"] = nodes;

    json functions;
    functions["family"] = "f-omega";
    functions["omegas"] = cfg.omegas;
    root["functions"] = functions;

    json quad;
    quad["points_per_panel"] = cfg.quad_points_per_panel;
    quad["grading_levels"] = cfg.quad_grading_levels;
    root["quadrature"] = quad;

    json sub;
    sub["h0"] = cfg.subsample_h0;
    sub["levels"] = cfg.subsample_levels;
    root["subsample"] = sub;

    json spectral;
    spectral["rank"] = cfg.spectral_rank;
    root["spectral"] = spectral;

    json output;
    output["dir"] = cfg.output_dir;
    root["output"] = output;

    root["seed"] = cfg.seed;
    return root.dump(2) + "\n";
}

kernels::RadialKernel make_kernel(const ExperimentConfig& cfg) {
    kernels::RadialKernel kernel = kernels::find_kernel(cfg.kernel_name);
    if (cfg.kernel_tau) kernel.tau = *cfg.kernel_tau;
    if (cfg.kernel_lengthscale) kernel.lengthscale = *cfg.kernel_lengthscale;
    return kernel;
}

geometry::Domain make_domain(const ExperimentConfig& cfg) {
    std::optional<geometry::ConeParams> cone;
    if (cfg.cone_angle || cfg.cone_radius) {
        if (!cfg.cone_angle || !cfg.cone_radius)
            throw UsageError("config: cone_angle and cone_radius must be given together");
        cone = geometry::ConeParams{*cfg.cone_angle, *cfg.cone_radius};
    }
    if (cfg.domain_kind == "interval")
        return geometry::Domain::interval(cfg.interval_a, cfg.interval_b,
                                          cfg.grid_resolution, cone);
    if (cfg.domain_kind == "box") {
        if (cfg.box_lo.empty() || cfg.box_lo.size() != cfg.box_hi.size())
            throw UsageError("config: box domain needs matching lo/hi arrays");
        Eigen::VectorXd lo(static_cast<Eigen::Index>(cfg.box_lo.size()));
        Eigen::VectorXd hi(static_cast<Eigen::Index>(cfg.box_hi.size()));
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            lo[i] = cfg.box_lo[static_cast<std::size_t>(i)];
            hi[i] = cfg.box_hi[static_cast<std::size_t>(i)];
        }
        return geometry::Domain::box(lo, hi, cfg.grid_resolution, cone);
    }
    return geometry::Domain::unit_disk(cfg.grid_resolution, cone);
}

rates::QuadratureSpec make_quadrature(const ExperimentConfig& cfg) {
    rates::QuadratureSpec quad;
    quad.points_per_panel = cfg.quad_points_per_panel;
    quad.grading_levels = cfg.quad_grading_levels;
    return quad;
}

}  // namespace rbflab::config
