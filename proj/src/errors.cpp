#include "affdim/errors.hpp"

namespace affdim {

ValidationError::ValidationError(const std::string& what,
                                 std::optional<std::size_t> map_index)
    : std::runtime_error(what), map_index_(map_index) {}

}  // namespace affdim
