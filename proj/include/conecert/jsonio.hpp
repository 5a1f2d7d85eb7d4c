#ifndef CONECERT_JSONIO_HPP
#define CONECERT_JSONIO_HPP

#include <string>

#include "conecert/certify.hpp"

namespace conecert {

// Certificates serialize to a stable JSON layout (kind, dims, level, form,
// payload, verifier_version); payload rationals are "p/q" strings so every
// value round-trips exactly. Two runs over the same inputs produce
// byte-identical files.
inline constexpr int kVerifierVersion = 1;

std::string membership_to_json(const MembershipCertificate& cert);
std::string refutation_to_json(const RefutationCertificate& cert);

MembershipCertificate membership_from_json(const std::string& text);
RefutationCertificate refutation_from_json(const std::string& text);

struct VerifyFileResult {
  bool ok;
  std::string kind;
  std::string detail;  // first failing check when !ok
};

// Full exact re-verification of a serialized certificate, independent of the
// search paths that produced it.
VerifyFileResult verify_certificate_text(const std::string& text);
VerifyFileResult verify_certificate_file(const std::string& path);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace conecert

#endif  // CONECERT_JSONIO_HPP
