#include "painstates/manifest.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "painstates/common.hpp"

namespace painstates {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 init failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), std::streamsize(buf.size()));
        const std::streamsize got = in.gcount();
        if (got > 0 && EVP_DigestUpdate(ctx, buf.data(), std::size_t(got)) != 1) {
            EVP_MD_CTX_free(ctx);
            throw Error("sha256 update failed");
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 final failed");
    }
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

// Files under base_dir are keyed relative to it; anything else (e.g. a spec
// file elsewhere) is keyed by bare filename so the manifest stays byte-
// identical across run locations.
std::string manifest_key(const std::string& path, const std::string& base_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path rel = fs::relative(path, base_dir, ec);
    if (!ec && !rel.empty() && rel.native().rfind("..", 0) != 0) return rel.generic_string();
    return fs::path(path).filename().generic_string();
}

}  // namespace

void RunManifest::add_input(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("missing file: " + path);
    inputs[manifest_key(path, base_dir)] = sha256_file(path);
}

void RunManifest::add_output(const std::string& path) {
    outputs[manifest_key(path, base_dir)] = sha256_file(path);
}

void RunManifest::save(const std::string& path) const {
    ordered_json j;
    j["stage"] = stage;
    j["version"] = kToolkitVersion;
    j["seed"] = seed;
    ordered_json in_j, out_j;
    for (const auto& [p, h] : inputs) in_j[p] = h;
    for (const auto& [p, h] : outputs) out_j[p] = h;
    j["inputs"] = in_j;
    j["outputs"] = out_j;
    j["config"] = config;
    save_json(path, j);
}

void verify_manifest_inputs(const std::string& manifest_path, const std::string& base_dir) {
    namespace fs = std::filesystem;
    const ordered_json j = load_json(manifest_path);
    for (const auto& [rel, hash] : j.at("inputs").items()) {
        if (j.at("outputs").contains(rel)) continue;  // stage updates it in place
        const fs::path path = fs::path(base_dir) / rel;
        if (!fs::exists(path)) continue;  // external input, not portable
        const std::string current = sha256_file(path.string());
        if (current != hash.get<std::string>())
            throw DataError("input changed since manifest: " + path.string());
    }
}

}  // namespace painstates
