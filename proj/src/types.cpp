#include "venuesense/types.hpp"

#include <cctype>

namespace venuesense {

std::string casefold(std::string_view text)
{
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

} // namespace venuesense
