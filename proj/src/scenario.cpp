#include "inverterlab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "inverterlab/errors.hpp"

namespace inverterlab::scenario {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

bool same_kind(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

const Json& segment_template() {
    static const Json seg = {{"start_s", 0.0}, {"resistance_ohm", 50.0}};
    return seg;
}

void overlay(Json& base, const Json& user, const std::string& prefix) {
    if (!user.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, value] : user.items()) {
        const std::string path = join(prefix, key);
        if (!base.contains(key)) throw ConfigError(path, "unknown key");
        Json& slot = base[key];
        if (slot.is_object()) {
            overlay(slot, value, path);
            continue;
        }
        if (path == "load.segments") {
            if (!value.is_array() || value.empty()) throw ConfigError(path, "expected a non-empty array");
            Json segments = Json::array();
            for (std::size_t i = 0; i < value.size(); ++i) {
                Json seg = segment_template();
                overlay(seg, value[i], path + "." + std::to_string(i));
                segments.push_back(seg);
            }
            slot = segments;
            continue;
        }
        if (!same_kind(slot, value)) throw ConfigError(path, "wrong value type");
        slot = value;
    }
}

Json* walk(Json& doc, std::string_view dotted_key) {
    Json* node = &doc;
    std::size_t pos = 0;
    while (pos <= dotted_key.size()) {
        const auto dot = dotted_key.find('.', pos);
        const std::string part(dotted_key.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
        if (node->is_object()) {
            if (!node->contains(part)) return nullptr;
            node = &(*node)[part];
        } else if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(part, &used);
                if (used != part.size()) return nullptr;
            } catch (const std::exception&) {
                return nullptr;
            }
            if (idx >= node->size()) return nullptr;
            node = &(*node)[idx];
        } else {
            return nullptr;
        }
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return node;
}

template <typename T>
T get(const Json& doc, const char* dotted) {
    const Json* node = walk(const_cast<Json&>(doc), dotted);
    if (node == nullptr) throw ConfigError(dotted, "missing");
    try {
        return node->get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(dotted, "wrong value type");
    }
}

}  // namespace

const Json& default_document() {
    static const Json doc = {
        {"plant", {{"inductance_H", 3e-3}, {"capacitance_F", 30e-6}, {"dc_bus_E", 400.0}}},
        {"load", {{"segments", Json::array({segment_template()})}}},
        {"reference", {{"rms_volts", 230.0}, {"frequency_hz", 50.0}}},
        {"controller",
         {{"type", "sliding"},
          {"k1", 5e3},
          {"k2", 5e3},
          {"k", 5e3},
          {"beta", 1e5},
          {"phi", 20.0},
          {"dis_dt", "analytic"},
          {"dis_filter_tau_s", 2e-4},
          {"fuzzy",
           {{"ke", 1.0 / 50.0},
            {"kde", 2e-6},
            {"ku", 0.5},
            {"resolution", 1001},
            {"feedforward", true},
            {"rule_file", ""}}}}},
        {"pwm", {{"carrier_hz", 10e3}}},
        {"sim",
         {{"model", "averaged"},
          {"duration_s", 0.1},
          {"step_s", 1e-6},
          {"control_period_s", 1e-4},
          {"harmonics", 50},
          {"initial", {{"x1", 0.0}, {"x2", 0.0}}}}},
    };
    return doc;
}

Json merge_with_defaults(const Json& user) {
    Json merged = default_document();
    overlay(merged, user, "");
    return merged;
}

void set_number(Json& doc, std::string_view dotted_key, double value) {
    Json* node = walk(doc, dotted_key);
    const std::string key(dotted_key);
    if (node == nullptr) throw ConfigError(key, "unknown key");
    if (!node->is_number()) throw ConfigError(key, "not a numeric entry");
    if (node->is_number_integer()) {
        if (value != std::floor(value)) throw ConfigError(key, "expects an integer");
        *node = static_cast<std::int64_t>(value);
    } else {
        *node = value;
    }
}

void set_string(Json& doc, std::string_view dotted_key, std::string_view value) {
    Json* node = walk(doc, dotted_key);
    const std::string key(dotted_key);
    if (node == nullptr) throw ConfigError(key, "unknown key");
    if (!node->is_string()) throw ConfigError(key, "not a string entry");
    *node = std::string(value);
}

sim::SimConfig to_config(const Json& doc, const std::filesystem::path& base_dir) {
    sim::SimConfig cfg;

    cfg.plant.inductance = get<double>(doc, "plant.inductance_H");
    cfg.plant.capacitance = get<double>(doc, "plant.capacitance_F");
    cfg.plant.dc_bus = get<double>(doc, "plant.dc_bus_E");

    std::vector<plant::LoadSegment> segments;
    for (const auto& seg : doc.at("load").at("segments"))
        segments.push_back({seg.at("start_s").get<double>(), seg.at("resistance_ohm").get<double>()});
    cfg.load = plant::LoadModel(std::move(segments));

    cfg.reference = reference::ReferenceSpec(get<double>(doc, "reference.rms_volts"),
                                             get<double>(doc, "reference.frequency_hz"));

    const auto type = get<std::string>(doc, "controller.type");
    const auto kind = sim::parse_controller(type);
    if (!kind) throw ConfigError("controller.type", "expected backstepping | sliding | fuzzy, got '" + type + "'");
    cfg.controller = *kind;
    cfg.gains.k1 = get<double>(doc, "controller.k1");
    cfg.gains.k2 = get<double>(doc, "controller.k2");
    cfg.gains.k = get<double>(doc, "controller.k");
    cfg.gains.beta = get<double>(doc, "controller.beta");
    cfg.gains.phi = get<double>(doc, "controller.phi");
    const auto rate = get<std::string>(doc, "controller.dis_dt");
    const auto rate_mode = sim::parse_load_rate(rate);
    if (!rate_mode) throw ConfigError("controller.dis_dt", "expected analytic | filtered, got '" + rate + "'");
    cfg.load_rate = *rate_mode;
    cfg.load_rate_filter_tau = get<double>(doc, "controller.dis_filter_tau_s");

    cfg.fuzzy.ke = get<double>(doc, "controller.fuzzy.ke");
    cfg.fuzzy.kde = get<double>(doc, "controller.fuzzy.kde");
    cfg.fuzzy.ku = get<double>(doc, "controller.fuzzy.ku");
    cfg.fuzzy.resolution = get<int>(doc, "controller.fuzzy.resolution");
    cfg.fuzzy.feedforward = get<bool>(doc, "controller.fuzzy.feedforward");
    if (const auto rule_file = get<std::string>(doc, "controller.fuzzy.rule_file"); !rule_file.empty()) {
        std::filesystem::path path(rule_file);
        if (path.is_relative()) path = base_dir / path;
        try {
            cfg.rules = fuzzy::RuleTable::load(path);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("controller.fuzzy.rule_file", e.what());
        }
    }

    cfg.pwm.carrier_hz = get<double>(doc, "pwm.carrier_hz");

    const auto model = get<std::string>(doc, "sim.model");
    const auto model_kind = sim::parse_model(model);
    if (!model_kind) throw ConfigError("sim.model", "expected averaged | switched, got '" + model + "'");
    cfg.model = *model_kind;
    cfg.duration = get<double>(doc, "sim.duration_s");
    cfg.step = get<double>(doc, "sim.step_s");
    cfg.control_period = get<double>(doc, "sim.control_period_s");
    cfg.harmonics = get<int>(doc, "sim.harmonics");
    cfg.initial.x1 = get<double>(doc, "sim.initial.x1");
    cfg.initial.x2 = get<double>(doc, "sim.initial.x2");

    cfg.validate();
    return cfg;
}

Json read_document(const std::filesystem::path& path) {
    if (path.empty()) return default_document();
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot read scenario " + path.string());
    Json user;
    try {
        user = Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed scenario: ") + e.what());
    }
    return merge_with_defaults(user);
}

sim::SimConfig load(const std::filesystem::path& path) {
    return to_config(read_document(path), path.empty() ? std::filesystem::path{} : path.parent_path());
}

Json summary_json(const sim::ScenarioSummary& s) {
    Json out;
    out["controller"] = std::string(sim::to_string(s.controller));
    out["model"] = std::string(sim::to_string(s.model));
    out["thd"] = s.thd ? Json(*s.thd) : Json(nullptr);
    out["rms_error_volts"] = s.tracking.rms_error;
    out["rms_error_pct"] = s.tracking.rms_error_pct;
    out["peak_error_volts"] = s.tracking.peak_error;
    out["settle_time_s"] = s.tracking.settle_time ? Json(*s.tracking.settle_time) : Json("none");
    out["saturation_count"] = s.saturation_count;
    out["output_rms_volts"] = s.output_rms;
    out["fundamental_volts"] = s.spectrum.magnitudes.empty() ? 0.0 : s.spectrum.magnitudes.front();
    return out;
}

}  // namespace inverterlab::scenario
