#pragma once

namespace rvasym {

// Every hot loop has a serial reference and an OpenMP version. Both produce
// bitwise-identical output; the serial one is kept for testing and benchmarks.
enum class Exec { serial, parallel };

}  // namespace rvasym
