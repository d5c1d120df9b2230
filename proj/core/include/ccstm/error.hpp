#pragma once

#include <stdexcept>
#include <string>

#include "ccstm/types.hpp"

namespace ccstm {

enum class ErrorCode {
  kNotFound,
  kTxnNotLive,
  kNoVisibleVersion,
  kCapacityExceeded,
  kValueOutOfRange,
  kRetryLimitExceeded,
  kIncompleteHistory,
  kWitnessInvalid,
  kConfigInvalid,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode c) noexcept;

// Usage and environment faults. Protocol-level aborts on commit are reported
// through CommitResult instead; aborts at read time raise TxnAborted.
class StmError : public std::runtime_error {
 public:
  StmError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by Engine::read when the protocol refuses a read. The transaction
// has already been moved to Aborted and its log flushed.
class TxnAborted : public std::runtime_error {
 public:
  TxnAborted(TxnId txn, AbortReason reason)
      : std::runtime_error("transaction " + std::to_string(raw(txn)) + " aborted: " +
                           std::string(to_string(reason))),
        txn_(txn),
        reason_(reason) {}

  TxnId txn() const noexcept { return txn_; }
  AbortReason reason() const noexcept { return reason_; }

 private:
  TxnId txn_;
  AbortReason reason_;
};

}  // namespace ccstm
