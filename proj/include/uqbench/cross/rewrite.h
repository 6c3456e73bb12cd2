#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uqbench/backend/backend.h"

namespace uqbench::cross {

inline constexpr std::array<std::string_view, 3> kIveReasons = {
    "Missing Interaction Target", "Implied Missing Associate", "Out of Frame"};

struct AmbVariant {
  std::string variant_question;
  std::vector<std::string> plausible_answers;

  bool operator==(const AmbVariant&) const = default;
};

struct IveVariant {
  std::string variant_question;
  std::string reason_unanswerable;

  bool operator==(const IveVariant&) const = default;
};

struct CrossRewriteResult {
  std::string analysis;
  std::optional<AmbVariant> amb;
  std::optional<IveVariant> ive;

  bool operator==(const CrossRewriteResult&) const = default;
};

void to_json(Json& j, const CrossRewriteResult& r);

// Strict parse: an object with exactly {analysis, AMB, IVE}; AMB/IVE may be
// null. A surrounding ```json fence is tolerated. Throws SchemaError for an
// IVE reason outside kIveReasons and DataError for any other violation.
CrossRewriteResult parse_cross_rewrite(const std::string& text);

struct CrossRewriteOptions {
  double temperature = 0.7;
  int max_retries = 3;  // after the first attempt
};

// Sends the AMB/IVE prompt with the image and "Base Question: <q>", retrying
// on unparsable output. When every attempt fails, throws SchemaError if the
// last failure was an illegal reason, RewriteFailedError otherwise.
// CapabilityError when the backend takes no images.
CrossRewriteResult rewrite_cross(const std::string& question,
                                 const std::vector<std::uint8_t>& image,
                                 backend::Backend& llm,
                                 const CrossRewriteOptions& options = {});

}  // namespace uqbench::cross
