#pragma once

#include <stdexcept>
#include <string>

namespace aggro {

enum class Errc {
    invalid_argument = 1,
    domain = 2,
    cfl = 3,
    boundary = 4,
    nonfinite = 5,
    mass_mismatch = 6,
    cap_exceeded = 7,
    io = 8,
    internal = 9,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace aggro
