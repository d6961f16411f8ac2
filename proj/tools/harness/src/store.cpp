#include "crp/harness/store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crp/errors.hpp"

namespace crp::harness {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> index_lines(const fs::path& index) {
  std::vector<std::string> out;
  std::ifstream in(index);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CertificateStore::CertificateStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::size_t CertificateStore::size() const { return index_lines(dir_ / "index.tsv").size(); }

std::string CertificateStore::append(const Certificate& cert) {
  char name[32];
  std::snprintf(name, sizeof name, "cert-%06zu.json", size() + 1);
  const auto path = dir_ / name;
  if (fs::exists(path)) throw ConfigurationError("store already holds " + path.string());
  {
    std::ofstream out(path, std::ios::binary);
    out << certificate_payload(cert);
    if (!out) throw ConfigurationError("cannot write " + path.string());
  }
  const auto& [solver, checker, n1] = std::visit(
      [](const auto& c) {
        std::string checker_id = "-";
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ExitFlagCertificate>) checker_id = c.checker_id;
        return std::tuple{c.solver_id, checker_id, c.dims.n1};
      },
      cert);
  std::ofstream index(dir_ / "index.tsv", std::ios::app);
  index << name << '\t' << certificate_kind(cert) << '\t' << solver << '\t' << checker << '\t' << n1 << '\n';
  return name;
}

std::vector<StoredCertificate> CertificateStore::load() const {
  std::vector<StoredCertificate> out;
  for (const auto& line : index_lines(dir_ / "index.tsv")) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("damaged index line '" + line + "'");
    auto file = line.substr(0, tab);
    auto cert = parse_certificate(read_file(dir_ / file));
    if (line.substr(tab + 1, line.find('\t', tab + 1) - tab - 1) != certificate_kind(cert)) {
      throw ParseError("index kind disagrees with " + file);
    }
    out.push_back({std::move(file), std::move(cert)});
  }
  return out;
}

}  // namespace crp::harness
