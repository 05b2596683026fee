#pragma once

#include <stdexcept>
#include <string>

namespace densenorm {

// Every failure the library can raise, so callers (and the CLI exit-code
// mapping) can dispatch on a stable identity instead of parsing messages.
enum class Errc {
    non_multiple_dimensions,
    odd_patch_size,
    out_of_grid,
    duplicate_write,
    missing_entry,
    empty_patch,
    empty_image,
    non_positive_sigma,
    bad_granularity,
    shape_mismatch,
    too_small_to_pad,
    unsupported_format,
    decode_error,
    missing_tile,
    duplicate_tile,
    bad_config,
    io_failure,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

const char* errc_name(Errc code);

// Process exit codes: 0 success, 2 configuration, 3 file I/O, 4 pipeline
// protocol violation (ordering/duplicate-write/missing-tile class).
int exit_code_for(Errc code);

}  // namespace densenorm
