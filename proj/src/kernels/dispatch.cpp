#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "cotforge/kernels/dot.hpp"

namespace cotforge::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(COTFORGE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* force = std::getenv("COTFORGE_FORCE_SCALAR");
    if (force && std::strcmp(force, "0") != 0 && *force) return Isa::scalar;
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

double dot(Isa isa, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
#if defined(COTFORGE_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  if (isa != Isa::scalar) throw std::invalid_argument("dot: ISA not compiled in");
  return scalar::dot(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) { return dot(active_isa(), a, b); }

void dot_rows(Isa isa, std::span<const double> query, std::span<const double> rows, std::span<double> out) {
  const std::size_t dim = query.size();
  if (dim == 0 || rows.size() != dim * out.size()) throw std::invalid_argument("dot_rows: shape mismatch");
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = dot(isa, query, rows.subspan(r * dim, dim));
}

void dot_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out) {
  dot_rows(active_isa(), query, rows, out);
}

}  // namespace cotforge::kernels
