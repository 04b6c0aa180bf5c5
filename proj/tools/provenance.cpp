#include "provenance.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>

#include "mobind/error.hpp"

namespace mobind::pipeline {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  }

  void update(std::string_view bytes) {
    if (EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()) != 1) throw Error("sha256: update failed");
  }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int size = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), digest, &size) != 1) throw Error("sha256: final failed");
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < size; ++i) {
      out.push_back(kDigits[digest[i] >> 4]);
      out.push_back(kDigits[digest[i] & 0xf]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

std::string utc_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto days = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{now - days};
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buffer;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  auto in = open(path);
  Sha256 sha;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) sha.update({buffer, static_cast<std::size_t>(in.gcount())});
  return sha.hex();
}

std::string sha256_sorted_lines(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  Sha256 sha;
  for (const auto& line : lines) {
    sha.update(line);
    sha.update("\n");
  }
  return sha.hex();
}

void write_provenance(const std::filesystem::path& out_dir, const ProvenanceRecord& record) {
  nlohmann::ordered_json doc;
  doc["tool"] = "mobind";
  doc["version"] = MOBIND_VERSION;
  doc["subcommand"] = record.subcommand;
  doc["config"] = record.config;
  auto& inputs = doc["inputs"] = nlohmann::ordered_json::array();
  for (const auto& path : record.inputs) {
    inputs.push_back({{"file", path.filename().string()}, {"sha256_sorted_lines", sha256_sorted_lines(path)}});
  }
  auto& artifacts = doc["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& path : record.artifacts) {
    artifacts.push_back({{"file", path.filename().string()}, {"sha256", sha256_file(path)}});
  }
  doc["created_at"] = utc_now();

  const auto target = out_dir / (record.subcommand + ".provenance.json");
  std::ofstream out(target, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + target.string());
  out << doc.dump(2) << '\n';
}

}  // namespace mobind::pipeline
