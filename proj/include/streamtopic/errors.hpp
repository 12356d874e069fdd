#ifndef STREAMTOPIC_ERRORS_HPP
#define STREAMTOPIC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamtopic {

/// Bad input data or a violated domain invariant. The CLI maps this to
/// exit code 2; anything else unexpected maps to 3.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One malformed record in a line-oriented input file. Collected and
/// reported instead of aborting the load.
struct RecordError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

}  // namespace streamtopic

#endif
