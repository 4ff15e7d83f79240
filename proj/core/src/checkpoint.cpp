#include "grex/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace grex {
namespace {

constexpr char kMagic[8] = {'G', 'R', 'E', 'X', 'C', 'K', 'P', 'T'};

void write_array(std::ofstream& os, const Eigen::MatrixXd& m) {
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
}

void read_array(std::ifstream& is, Eigen::MatrixXd& m) {
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const AdamState* adam, const CheckpointMeta& meta) {
    nlohmann::ordered_json manifest;
    manifest["dtype"] = "f64";
    manifest["layout"] = "col_major";
    manifest["ema_coeff"] = meta.ema_coeff;
    manifest["step"] = meta.step;
    manifest["has_adam"] = adam != nullptr;
    auto arrays = nlohmann::ordered_json::array();
    long long offset = 0;
    auto describe = [&](const std::string& kind, const std::string& name,
                        const Eigen::MatrixXd& m) {
        arrays.push_back({{"name", kind + "/" + name},
                          {"rows", m.rows()},
                          {"cols", m.cols()},
                          {"offset", offset}});
        offset += static_cast<long long>(sizeof(double)) * m.size();
    };
    for (int i = 0; i < store.size(); ++i) describe("param", store.name(i), store.value(i));
    for (int i = 0; i < store.size(); ++i) describe("ema", store.name(i), store.ema(i));
    if (adam) {
        auto& a = *const_cast<AdamState*>(adam);
        for (int i = 0; i < store.size(); ++i)
            describe("adam_m", store.name(i), a.first_moments()[i]);
        for (int i = 0; i < store.size(); ++i)
            describe("adam_v", store.name(i), a.second_moments()[i]);
    }
    manifest["arrays"] = std::move(arrays);

    const std::string json = manifest.dump();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path.string());
    os.write(kMagic, sizeof(kMagic));
    std::uint64_t len = json.size();
    os.write(reinterpret_cast<const char*>(&len), sizeof(len));
    os.write(json.data(), static_cast<std::streamsize>(json.size()));
    for (int i = 0; i < store.size(); ++i) write_array(os, store.value(i));
    for (int i = 0; i < store.size(); ++i) write_array(os, store.ema(i));
    if (adam) {
        auto& a = *const_cast<AdamState*>(adam);
        for (int i = 0; i < store.size(); ++i) write_array(os, a.first_moments()[i]);
        for (int i = 0; i < store.size(); ++i) write_array(os, a.second_moments()[i]);
    }
}

CheckpointMeta load_checkpoint(const std::filesystem::path& path, ParamStore& store,
                               AdamState* adam) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[8];
    is.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file: " + path.string());
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string json(len, '\0');
    is.read(json.data(), static_cast<std::streamsize>(len));
    nlohmann::json manifest = nlohmann::json::parse(json);
    if (manifest.at("dtype") != "f64") throw std::runtime_error("checkpoint: unsupported dtype");

    CheckpointMeta meta;
    meta.ema_coeff = manifest.at("ema_coeff").get<double>();
    meta.step = manifest.at("step").get<long long>();
    const bool has_adam = manifest.at("has_adam").get<bool>();
    if (adam) adam->ensure(store);

    auto expect_shape = [&](const nlohmann::json& entry, const Eigen::MatrixXd& m) {
        if (entry.at("rows").get<long long>() != m.rows() ||
            entry.at("cols").get<long long>() != m.cols())
            throw std::runtime_error("checkpoint: shape mismatch for " +
                                     entry.at("name").get<std::string>());
    };
    std::size_t at = 0;
    const auto& arrays = manifest.at("arrays");
    auto next = [&](const std::string& kind, const std::string& name) -> const nlohmann::json& {
        if (at >= arrays.size()) throw std::runtime_error("checkpoint: manifest truncated");
        const auto& entry = arrays[at++];
        if (entry.at("name").get<std::string>() != kind + "/" + name)
            throw std::runtime_error("checkpoint: parameter set mismatch at " +
                                     entry.at("name").get<std::string>());
        return entry;
    };
    for (int i = 0; i < store.size(); ++i) {
        expect_shape(next("param", store.name(i)), store.value(i));
        read_array(is, store.value(i));
    }
    for (int i = 0; i < store.size(); ++i) {
        expect_shape(next("ema", store.name(i)), store.ema(i));
        read_array(is, store.ema(i));
    }
    if (has_adam) {
        Eigen::MatrixXd skip;
        for (const std::string kind : {"adam_m", "adam_v"}) {
            for (int i = 0; i < store.size(); ++i) {
                const auto& entry = next(kind, store.name(i));
                Eigen::MatrixXd& dst = adam ? (kind == "adam_m" ? adam->first_moments()[i]
                                                                : adam->second_moments()[i])
                                            : skip;
                dst.resize(entry.at("rows").get<long long>(), entry.at("cols").get<long long>());
                read_array(is, dst);
            }
        }
        if (adam) adam->set_steps(meta.step);
    }
    if (!is) throw std::runtime_error("checkpoint: blob truncated");
    return meta;
}

}  // namespace grex
