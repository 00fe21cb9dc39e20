#ifndef HAZARDLAB_VERSION_HPP
#define HAZARDLAB_VERSION_HPP

namespace hazardlab {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
