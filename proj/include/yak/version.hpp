#ifndef YAK_VERSION_HPP
#define YAK_VERSION_HPP

namespace yak {

inline constexpr const char* kYakVersion = "0.1.0";

}  // namespace yak

#endif  // YAK_VERSION_HPP
