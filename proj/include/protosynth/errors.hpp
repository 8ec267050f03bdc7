#ifndef PROTOSYNTH_ERRORS_HPP
#define PROTOSYNTH_ERRORS_HPP

#include <stdexcept>

namespace protosynth {

/// A configured size or node bound was exceeded.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace protosynth

#endif // PROTOSYNTH_ERRORS_HPP
