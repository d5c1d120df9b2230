#include "ccstm/types.hpp"

#include <string>

#include "ccstm/error.hpp"

namespace ccstm {

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::kBto:
      return "bto";
    case Protocol::kSgt:
      return "sgt";
    case Protocol::kMvto:
      return "mvto";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "bto") return Protocol::kBto;
  if (name == "sgt") return Protocol::kSgt;
  if (name == "mvto") return Protocol::kMvto;
  throw StmError(ErrorCode::kConfigInvalid, "unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(AbortReason r) noexcept {
  switch (r) {
    case AbortReason::kStaleRead:
      return "stale-read";
    case AbortReason::kStaleWrite:
      return "stale-write";
    case AbortReason::kCycleDetected:
      return "cycle-detected";
    case AbortReason::kObsoleteVersion:
      return "obsolete-version";
    case AbortReason::kUserRequested:
      return "user-requested";
  }
  return "?";
}

std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::kNotFound:
      return "not-found";
    case ErrorCode::kTxnNotLive:
      return "txn-not-live";
    case ErrorCode::kNoVisibleVersion:
      return "no-visible-version";
    case ErrorCode::kCapacityExceeded:
      return "capacity-exceeded";
    case ErrorCode::kValueOutOfRange:
      return "value-out-of-range";
    case ErrorCode::kRetryLimitExceeded:
      return "retry-limit-exceeded";
    case ErrorCode::kIncompleteHistory:
      return "incomplete-history";
    case ErrorCode::kWitnessInvalid:
      return "witness-invalid";
    case ErrorCode::kConfigInvalid:
      return "config-invalid";
    case ErrorCode::kIo:
      return "io-error";
    case ErrorCode::kParse:
      return "parse-error";
  }
  return "?";
}

}  // namespace ccstm
