#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcs {

enum class Errc {
  InvalidArgument,
  Io,
  // objects and stores
  UnknownObject,
  CorruptObject,
  MalformedObject,
  Ambiguous,
  // text and binary deltas
  ScriptMismatch,
  BaseLengthMismatch,
  CopyOutOfRange,
  TargetLengthMismatch,
  ChainMismatch,
  MalformedDelta,
  // weave
  DuplicateRevision,
  UnknownParent,
  UnknownRevision,
  MalformedWeave,
  // revlog
  LockHeld,
  OutOfRange,
  CorruptHunk,
  // pack
  DanglingReference,
  CorruptPack,
  // history
  UnknownCommit,
  EmptyResult,
  UnrelatedHistories,
  NoMarks,
  // patches
  HunkFailed,
  MalformedPatch,
  // repository
  NotARepository,
  DirtyTree,
  UnknownRef,
  ConflictsPending,
  NonFastForwardPush,
  UnknownRemote,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vcs
