#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace venuesense {

using Point2 = Eigen::Vector2d;
using Hsl = Eigen::Vector3d;

using VenueId = std::string;
using UserId = std::string;
using MacAddress = std::string;

// Visual-word bag: token -> occurrence count.
using VistermBag = std::map<std::string, std::size_t>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class VersionError : public ParseError {
public:
    using ParseError::ParseError;
};

/// ASCII case folding; names, SSIDs and OCR words are compared folded.
std::string casefold(std::string_view text);

} // namespace venuesense
