#include "osil/diff/checkpoint.hpp"

#include <fstream>

#include "osil/core/errors.hpp"

namespace osil {

nlohmann::json mlp_to_json(const Mlp& net) {
    nlohmann::json j;
    j["layer_sizes"] = net.layer_sizes();
    j["activation"] = to_string(net.activation());
    j["transform"] = to_string(net.transform());
    j["name"] = net.name();
    j["values"] = net.params().values();
    return j;
}

Mlp mlp_from_json(const nlohmann::json& j) {
    Mlp net(j.at("layer_sizes").get<std::vector<int>>(),
            activation_from_string(j.at("activation").get<std::string>()),
            output_transform_from_string(j.at("transform").get<std::string>()),
            j.value("name", "mlp"));
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != net.params().size()) {
        throw DataError("mlp_from_json: value count " + std::to_string(values.size()) +
                        " does not match architecture (" + std::to_string(net.params().size()) +
                        ")");
    }
    net.params().values() = std::move(values);
    return net;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out << j.dump(2) << "\n";
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

nlohmann::json versioned(const std::string& kind, nlohmann::json payload) {
    nlohmann::json j;
    j["version"] = kCheckpointVersion;
    j["kind"] = kind;
    j["payload"] = std::move(payload);
    return j;
}

nlohmann::json check_versioned(const std::string& kind, const nlohmann::json& j) {
    if (!j.contains("version")) throw DataError("missing version field (kind " + kind + ")");
    const int v = j.at("version").get<int>();
    if (v != kCheckpointVersion) {
        throw DataError("unsupported version " + std::to_string(v) + " for kind " + kind);
    }
    const std::string k = j.value("kind", "");
    if (k != kind) throw DataError("expected kind " + kind + ", found " + k);
    return j.at("payload");
}

}  // namespace osil
