#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chartex {

enum class errc {
  degenerate_corners,
  point_at_infinity,
  singular_matrix,
  empty_input,
  degenerate_input,
  insufficient_edges,
  bad_intersections,
  zero_norm_embedding,
  unparseable_text,
  insufficient_labels,
  no_consensus,
  too_many_lines,
  inadmissible_format,
  invalid_argument,
  io_error,
};

std::string_view errc_name(errc code);

/// Exception carrying a machine-readable code and, once a pipeline stage
/// has seen it, the stage tag where it surfaced.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const { return code_; }
  const std::string& stage() const { return stage_; }

  /// Tags the error with the pipeline stage it escaped from. The first tag
  /// wins; outer stages do not overwrite it.
  void tag_stage(std::string_view stage) {
    if (stage_.empty()) stage_ = std::string(stage);
  }

 private:
  errc code_;
  std::string stage_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chartex
