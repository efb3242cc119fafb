#include "dofde/kernel_cache.hpp"

#include <unistd.h>

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace dofde::expsum {

namespace {

std::string canonical_key(const std::string& kernel_id, double tol, long prec_bits,
                          int fixed_terms) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "|%.17g|%ld|%d", tol, prec_bits, fixed_terms);
  return kernel_id + buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return out;
}

}  // namespace

std::string cache_key(const CompressedKernel& ck) {
  return canonical_key(ck.kernel_id, ck.tolerance, ck.precision_bits, ck.fixed_terms);
}

std::string cache_path(const std::string& dir, const std::string& key) {
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a64(key));
  std::string prefix = sanitize(key.substr(0, key.find('|')));
  return dir + "/" + prefix + "-" + hex + ".json";
}

std::optional<CompressedKernel> cache_load(const std::string& dir, const kernels::DOKernel& k,
                                           const CompressOptions& opt) {
  if (dir.empty()) return std::nullopt;
  const mpfr_prec_t prec =
      opt.precision > 0 ? opt.precision : (opt.tol <= 1e-30 ? mpfr_prec_t(512) : mpfr_prec_t(256));
  const std::string key =
      canonical_key(kernels::kernel_id(k), opt.tol, static_cast<long>(prec), opt.fixed_terms);
  const std::string path = cache_path(dir, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("schema_version").get<int>() != 1) return std::nullopt;
    CompressedKernel ck;
    ck.kernel_id = j.at("kernel_id").get<std::string>();
    ck.interval = j.at("interval").get<int>();
    ck.tolerance = j.at("tolerance").get<double>();
    ck.precision_bits = j.at("precision_bits").get<long>();
    ck.fixed_terms = j.at("fixed_terms").get<int>();
    ck.l1_error = j.at("l1_error").get<double>();
    for (const auto& t : j.at("terms")) {
      ck.terms.push_back(ExpTerm{t.at("weight").get<double>(), t.at("rate").get<double>()});
    }
    if (j.at("m").get<int>() != ck.m()) return std::nullopt;
    if (ck.kernel_id != kernels::kernel_id(k) || ck.tolerance != opt.tol ||
        ck.precision_bits != static_cast<long>(prec) || ck.fixed_terms != opt.fixed_terms)
      return std::nullopt;
    if (opt.certify && ck.l1_error < 0.0) return std::nullopt;
    return ck;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "warning: ignoring unreadable kernel cache entry %s (%s)\n", path.c_str(),
                 e.what());
    return std::nullopt;
  }
}

void cache_store(const std::string& dir, const CompressedKernel& ck) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kernel_id"] = ck.kernel_id;
  j["interval"] = ck.interval;
  j["tolerance"] = ck.tolerance;
  j["precision_bits"] = ck.precision_bits;
  j["fixed_terms"] = ck.fixed_terms;
  j["l1_error"] = ck.l1_error;
  j["m"] = ck.m();
  nlohmann::json terms = nlohmann::json::array();
  for (const ExpTerm& t : ck.terms) terms.push_back({{"weight", t.weight}, {"rate", t.rate}});
  j["terms"] = terms;

  const std::string path = cache_path(dir, cache_key(ck));
  const std::string tmp = path + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    out << j.dump(1) << "\n";
    if (!out) {
      std::fprintf(stderr, "warning: could not write kernel cache entry %s\n", tmp.c_str());
      std::filesystem::remove(tmp, ec);
      return;
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::fprintf(stderr, "warning: could not publish kernel cache entry %s (%s)\n", path.c_str(),
                 ec.message().c_str());
    std::filesystem::remove(tmp, ec);
  }
}

CompressedKernel compress_cached(const kernels::DOKernel& k, const CompressOptions& opt,
                                 const std::string& cache_dir) {
  if (auto hit = cache_load(cache_dir, k, opt)) {
    // An entry stored by a certification-free run satisfies a certifying
    // caller only after the error bound is filled in.
    if (opt.certify && hit->l1_error < 0.0) {
      hit->l1_error = l1_error(k, *hit).to_double();
      cache_store(cache_dir, *hit);
    }
    return *hit;
  }
  CompressedKernel ck = compress(k, opt);
  cache_store(cache_dir, ck);
  return ck;
}

}  // namespace dofde::expsum
