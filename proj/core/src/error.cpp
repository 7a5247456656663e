#include <chartex/error.hpp>

namespace chartex {

std::string_view errc_name(errc code) {
  switch (code) {
    case errc::degenerate_corners: return "DegenerateCorners";
    case errc::point_at_infinity: return "PointAtInfinity";
    case errc::singular_matrix: return "SingularMatrix";
    case errc::empty_input: return "EmptyInput";
    case errc::degenerate_input: return "DegenerateInput";
    case errc::insufficient_edges: return "InsufficientEdges";
    case errc::bad_intersections: return "BadIntersections";
    case errc::zero_norm_embedding: return "ZeroNormEmbedding";
    case errc::unparseable_text: return "UnparseableText";
    case errc::insufficient_labels: return "InsufficientLabels";
    case errc::no_consensus: return "NoConsensus";
    case errc::too_many_lines: return "TooManyLines";
    case errc::inadmissible_format: return "InadmissibleFormat";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace chartex
