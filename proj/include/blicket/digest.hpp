#pragma once
#include <string>
#include <string_view>

namespace blicket {

std::string sha256_hex(std::string_view data);

}
