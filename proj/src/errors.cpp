#include "densenorm/errors.hpp"

namespace densenorm {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::non_multiple_dimensions: return "NonMultipleDimensions";
        case Errc::odd_patch_size: return "OddPatchSize";
        case Errc::out_of_grid: return "OutOfGrid";
        case Errc::duplicate_write: return "DuplicateWrite";
        case Errc::missing_entry: return "MissingEntry";
        case Errc::empty_patch: return "EmptyPatch";
        case Errc::empty_image: return "EmptyImage";
        case Errc::non_positive_sigma: return "NonPositiveSigma";
        case Errc::bad_granularity: return "BadGranularity";
        case Errc::shape_mismatch: return "ShapeMismatch";
        case Errc::too_small_to_pad: return "TooSmallToPad";
        case Errc::unsupported_format: return "UnsupportedFormat";
        case Errc::decode_error: return "DecodeError";
        case Errc::missing_tile: return "MissingTile";
        case Errc::duplicate_tile: return "DuplicateTile";
        case Errc::bad_config: return "BadConfig";
        case Errc::io_failure: return "IoFailure";
    }
    return "UnknownError";
}

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::non_multiple_dimensions:
        case Errc::odd_patch_size:
        case Errc::bad_granularity:
        case Errc::bad_config:
        case Errc::empty_patch:
        case Errc::empty_image:
        case Errc::shape_mismatch:
        case Errc::non_positive_sigma:
            return 2;
        case Errc::too_small_to_pad:
        case Errc::unsupported_format:
        case Errc::decode_error:
        case Errc::io_failure:
            return 3;
        case Errc::out_of_grid:
        case Errc::duplicate_write:
        case Errc::missing_entry:
        case Errc::missing_tile:
        case Errc::duplicate_tile:
            return 4;
    }
    return 1;
}

}  // namespace densenorm
