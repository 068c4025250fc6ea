#include "cohana/exec/scan.hpp"

namespace cohana::exec {

ScanCursor::ScanCursor(const storage::ChunkView& chunk,
                       std::int64_t birth_action_code,
                       ScanStats& stats)
    : chunk_(chunk), birth_code_(birth_action_code), stats_(stats) {}

bool ScanCursor::next_user() {
  if (next_run_ >= chunk_.users) {
    pos_ = high_ = chunk_.rows;
    return false;
  }
  run_ = chunk_.run(next_run_++);
  pos_ = run_.first;
  high_ = run_.first;
  birth_known_ = false;
  birth_.reset();
  ++stats_.users_visited;
  return true;
}

std::optional<std::uint32_t> ScanCursor::birth_row() {
  if (birth_known_) return birth_;
  birth_known_ = true;
  if (birth_code_ >= 0) {
    const auto& actions = chunk_.columns[ActivitySchema::kActionColumn].str.codes;
    const auto code = static_cast<std::uint64_t>(birth_code_);
    for (std::uint32_t r = run_.first; r < user_end(); ++r) {
      touch(r);
      if (actions[r] == code) {
        birth_ = r;
        break;
      }
    }
  }
  return birth_;
}

}  // namespace cohana::exec
