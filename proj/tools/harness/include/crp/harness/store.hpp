#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crp/harness/certio.hpp"

namespace crp::harness {

struct StoredCertificate {
  std::string file;  // cert-NNNNNN.json, relative to the store
  Certificate certificate;
};

/// Append-only directory of certificate files plus index.tsv
/// ("<file>\t<kind>\t<solver id>\t<checker id or ->\t<N1>").
class CertificateStore {
 public:
  explicit CertificateStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  /// Writes the next record and its index line; returns the file name.
  std::string append(const Certificate& cert);
  /// Files in index order. Throws ParseError on a damaged index or record.
  std::vector<StoredCertificate> load() const;
  std::size_t size() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace crp::harness
