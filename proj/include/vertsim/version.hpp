#ifndef VERTSIM_VERSION_HPP
#define VERTSIM_VERSION_HPP

namespace vertsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace vertsim

#endif
