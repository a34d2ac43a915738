#pragma once

// Needs nlohmann/json (vendor/json.hpp) and OpenSSL libcrypto; not pulled in by
// the umbrella header.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"
#include "poincarezeta/core/types.hpp"

namespace poincarezeta {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw InvalidArgument("sha256: digest failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline std::string file_sha256(const std::string& path) { return sha256_hex(read_file_bytes(path)); }

/// Flat key-value run record. Keys keep insertion order; values are strings,
/// numbers or booleans. The identity hash covers everything except the
/// output hashes, which are filled in after the artifacts exist.
class RunManifest {
 public:
  using Json = nlohmann::ordered_json;

  RunManifest() = default;
  explicit RunManifest(const std::string& command) {
    doc_["tool_version"] = kToolVersion;
    doc_["command"] = command;
  }

  template <class T>
  void set(const std::string& key, const T& value) {
    if (key.rfind("output_hash.", 0) == 0) throw InvalidArgument("manifest: reserved key " + key);
    doc_[key] = value;
  }

  bool has(const std::string& key) const { return doc_.contains(key); }
  const Json& get(const std::string& key) const { return doc_.at(key); }
  const Json& document() const { return doc_; }

  std::string command() const { return doc_.value("command", std::string()); }

  /// SHA-256 of the canonical text without output hashes.
  std::string identity_hash() const {
    Json core = Json::object();
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (it.key().rfind("output_hash.", 0) != 0) core[it.key()] = it.value();
    return sha256_hex(core.dump());
  }

  void record_output(const std::string& label, const std::string& path) {
    doc_["output_hash." + label] = file_sha256(path);
  }

  std::vector<std::pair<std::string, std::string>> output_hashes() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (it.key().rfind("output_hash.", 0) == 0) out.emplace_back(it.key().substr(12), it.value().get<std::string>());
    return out;
  }

  std::string text() const { return doc_.dump(2) + "\n"; }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("manifest: cannot write " + path);
    os << text();
  }

  static RunManifest load(const std::string& path) {
    RunManifest m;
    try {
      m.doc_ = Json::parse(read_file_bytes(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("manifest: ") + e.what());
    }
    if (!m.doc_.is_object() || !m.doc_.contains("command")) throw InvalidArgument("manifest: missing command");
    for (auto it = m.doc_.begin(); it != m.doc_.end(); ++it)
      if (it.value().is_structured()) throw InvalidArgument("manifest: nested value at " + it.key());
    return m;
  }

 private:
  Json doc_ = Json::object();
};

}  // namespace poincarezeta
