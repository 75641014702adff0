#pragma once

// Dot-product kernels behind embedding retrieval. The scalar versions are the
// reference; SIMD variants are selected at runtime when the CPU supports them
// and are tested for equivalence against the scalar path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cotforge::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

// Best ISA available on this machine and compiled into this binary.
// COTFORGE_FORCE_SCALAR=1 in the environment pins the scalar path.
Isa active_isa();
bool isa_available(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double dot(Isa isa, std::span<const double> a, std::span<const double> b);

// out[r] = <query, rows[r*dim .. r*dim+dim)>; rows is row-major.
void dot_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out);
void dot_rows(Isa isa, std::span<const double> query, std::span<const double> rows, std::span<double> out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
}

#if defined(COTFORGE_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
}
#endif

}  // namespace cotforge::kernels
