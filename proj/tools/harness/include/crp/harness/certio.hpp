#pragma once

// JSON records for certificates. Rationals are "num/den" strings; object keys
// come out sorted, so equal certificates serialize to equal bytes.

#include <string>
#include <variant>

#include <json.hpp>

#include "crp/adversary.hpp"

namespace crp::harness {

using Json = nlohmann::json;
using Certificate = std::variant<FailureCertificate, ExitFlagCertificate>;

Json rational_json(const Rational& r);
Rational rational_from(const Json& j);
Json vec_json(const Vec& v);
Vec vec_from(const Json& j);

Json family_json(const Family& family);
Family family_from(const Json& j);

Json certificate_json(const Certificate& cert);
Certificate certificate_from(const Json& j);

/// Pretty-printed record with a trailing newline.
std::string certificate_payload(const Certificate& cert);
Certificate parse_certificate(const std::string& text);

std::string recheck(const Certificate& cert);
std::string reverify(const Certificate& cert, const SubjectRegistry& registry);
const char* certificate_kind(const Certificate& cert);

}  // namespace crp::harness
