#include "veritas/provenance/fair.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>

#include "veritas/error.hpp"

namespace veritas {

Json fair_to_json(const FairDescriptor& f) {
  Json j;
  j["schema"] = kFairSchema;
  j["identifier"] = f.identifier;
  j["title"] = f.title;
  j["creators"] = f.creators;
  j["license"] = f.license;
  j["datasets"] = Json::array();
  for (const auto& d : f.datasets) j["datasets"].push_back({{"name", d.name}, {"locator", d.locator}, {"sha256", d.sha256}});
  j["keywords"] = f.keywords;
  j["harness_version"] = f.harness_version;
  j["manifest_sha256"] = f.manifest_sha256;
  return j;
}

FairDescriptor fair_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != kFairSchema) {
    throw Error(ErrorKind::invalid_argument, "FAIR descriptor schema is not " + std::string(kFairSchema));
  }
  auto str = [&](const char* key) { return j.contains(key) ? j[key].get<std::string>() : std::string(); };
  auto strs = [&](const char* key) {
    return j.contains(key) ? j[key].get<std::vector<std::string>>() : std::vector<std::string>{};
  };
  try {
    FairDescriptor f;
    f.identifier = str("identifier");
    f.title = str("title");
    f.creators = strs("creators");
    f.license = str("license");
    if (j.contains("datasets")) {
      for (const auto& d : j["datasets"]) {
        f.datasets.push_back({d.value("name", ""), d.value("locator", ""), d.value("sha256", "")});
      }
    }
    f.keywords = strs("keywords");
    f.harness_version = str("harness_version");
    f.manifest_sha256 = str("manifest_sha256");
    return f;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed FAIR descriptor: ") + e.what());
  }
}

FairDescriptor load_fair(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  const Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::invalid_argument, path.string() + ": not valid JSON");
  return fair_from_json(j);
}

std::vector<std::string> fair_gaps(const FairDescriptor& f) {
  std::vector<std::string> gaps;
  if (f.identifier.empty()) gaps.emplace_back("identifier missing");
  if (f.license.empty()) gaps.emplace_back("license missing");
  if (f.datasets.empty()) gaps.emplace_back("no dataset reference");
  for (std::size_t i = 0; i < f.datasets.size(); ++i) {
    const auto& d = f.datasets[i];
    const std::string at = "datasets[" + std::to_string(i) + "]";
    if (d.name.empty()) gaps.push_back(at + ".name missing");
    if (d.locator.empty()) gaps.push_back(at + ".locator missing");
    const bool hex = d.sha256.size() == 64 &&
                     d.sha256.find_first_not_of("0123456789abcdef") == std::string::npos;
    if (!hex) gaps.push_back(at + ".sha256 is not a 64-digit lowercase hex digest");
  }
  return gaps;
}

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorKind::internal_inconsistency, "SHA-256 unavailable");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

}  // namespace veritas
