#pragma once

#include <cstddef>
#include <string>

namespace fuplab {

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

}  // namespace fuplab
