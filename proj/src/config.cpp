#include "socl/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace socl {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
    if (grid_resolution < 2) throw std::invalid_argument("grid resolution must be >= 2 per axis");
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be > 0");
    if (radius_scale <= 0.0) throw std::invalid_argument("radius scale must be > 0");
    if (loss_bound <= 0.0) throw std::invalid_argument("loss bound must be > 0");
    mapping_kind();  // throws on unknown names
}

Environment ExperimentConfig::build_environment() const {
    Environment env = make_preset(preset, dimension);
    if (offset_b) {
        env.offset_b = *offset_b;
        if (env.safe_set_kind == SafeSetKind::Ball) env.safe_ball_radius = *offset_b;
    }
    if (noise_std) env.noise_std = *noise_std;
    if (constraint) {
        if (env.finite()) throw std::invalid_argument("explicit constraint needs a continuous preset");
        env.fstar = *constraint;
    }
    if (loss_kind) {
        if (*loss_kind == "fixed") env.adversary.kind = LossKind::Fixed;
        else if (*loss_kind == "iid") env.adversary.kind = LossKind::Iid;
        else if (*loss_kind == "switching") env.adversary.kind = LossKind::Switching;
        else throw std::invalid_argument("unknown loss kind: " + *loss_kind);
    }
    if (loss_vector) env.adversary.fixed = *loss_vector;
    env.adversary.bound = loss_bound;
    env.validate();
    return env;
}

MappingKind ExperimentConfig::mapping_kind() const {
    const std::string name = mapping.value_or(preset == "finite_k10" ? "explore_exploit"
                                                                     : "scaling");
    if (name == "scaling") return MappingKind::Scaling;
    if (name == "explore_exploit") return MappingKind::ExploreExploit;
    if (name == "saddle") return MappingKind::Saddle;
    if (name == "exp3_kappa") return MappingKind::Exp3Kappa;
    if (name == "identity") return MappingKind::Identity;
    throw std::invalid_argument("unknown mapping: " + name);
}

namespace {

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
    return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    json root = json::parse(text);
    ExperimentConfig cfg;
    cfg.horizon = root.value("horizon", cfg.horizon);
    cfg.delta = root.value("delta", cfg.delta);
    cfg.seed = root.value("seed", cfg.seed);

    if (root.contains("environment")) {
        const json& env = root["environment"];
        cfg.preset = env.value("preset", cfg.preset);
        cfg.dimension = env.value("dimension", cfg.dimension);
        if (env.contains("offset")) cfg.offset_b = env["offset"].get<double>();
        if (env.contains("noise_std")) cfg.noise_std = env["noise_std"].get<double>();
        if (env.contains("constraint")) cfg.constraint = vector_from_json(env["constraint"]);
        if (env.contains("loss")) {
            const json& loss = env["loss"];
            if (loss.contains("kind")) cfg.loss_kind = loss["kind"].get<std::string>();
            if (loss.contains("vector")) cfg.loss_vector = vector_from_json(loss["vector"]);
            cfg.loss_bound = loss.value("bound", cfg.loss_bound);
        }
    }
    if (root.contains("oracle")) {
        const json& oracle = root["oracle"];
        cfg.lambda = oracle.value("lambda", cfg.lambda);
        cfg.radius_scale = oracle.value("radius_scale", cfg.radius_scale);
    }
    if (root.contains("learning")) {
        cfg.grid_resolution = root["learning"].value("grid_resolution", cfg.grid_resolution);
    }
    if (root.contains("mapping")) {
        const json& mapping = root["mapping"];
        if (mapping.contains("kind")) cfg.mapping = mapping["kind"].get<std::string>();
        cfg.kappa = mapping.value("kappa", cfg.kappa);
    }
    if (root.contains("output")) {
        const json& output = root["output"];
        cfg.trace_path = output.value("trace", cfg.trace_path);
        cfg.summary_path = output.value("summary", cfg.summary_path);
        cfg.diagnostics = output.value("diagnostics", cfg.diagnostics);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_string(buffer.str());
}

std::string ExperimentConfig::to_json_string() const {
    json root;
    root["horizon"] = horizon;
    root["delta"] = delta;
    root["seed"] = seed;
    json env;
    env["preset"] = preset;
    env["dimension"] = dimension;
    if (offset_b) env["offset"] = *offset_b;
    if (noise_std) env["noise_std"] = *noise_std;
    if (constraint) {
        std::vector<double> v(constraint->data(), constraint->data() + constraint->size());
        env["constraint"] = v;
    }
    json loss;
    if (loss_kind) loss["kind"] = *loss_kind;
    if (loss_vector) {
        std::vector<double> v(loss_vector->data(), loss_vector->data() + loss_vector->size());
        loss["vector"] = v;
    }
    loss["bound"] = loss_bound;
    env["loss"] = loss;
    root["environment"] = env;
    root["oracle"] = {{"lambda", lambda}, {"radius_scale", radius_scale}};
    root["learning"] = {{"grid_resolution", grid_resolution}};
    json mapping_json;
    if (mapping) mapping_json["kind"] = *mapping;
    mapping_json["kappa"] = kappa;
    root["mapping"] = mapping_json;
    if (!trace_path.empty() || !summary_path.empty())
        root["output"] = {{"trace", trace_path}, {"summary", summary_path}};
    return root.dump(2);
}

}  // namespace socl
