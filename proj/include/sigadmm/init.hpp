#pragma once

#include <cstdint>
#include <string>

#include "sigadmm/net.hpp"

namespace sigadmm {

enum class InitKind { lecun_unif, lecun_gauss, orth_unif, orth_gauss, xavier, msra };

// Weight initialization recipe. scale multiplies every sampled matrix, so
// scale = 8 widens the draw eightfold while keeping its shape.
struct InitScheme {
  InitKind kind = InitKind::msra;
  double scale = 1.0;
};

// Parses "msra", "msra:8", "lecun_unif:0.25" and friends.
InitScheme parse_scheme(const std::string& text);
std::string to_string(const InitScheme& scheme);
std::string to_string(InitKind kind);

// Draws weights for the layer widths dims = {d_0, ..., d_N}. All schemes are
// bias-free. Sampling order is fixed (layer by layer, column major), so a
// given (dims, scheme, seed) triple always produces the same matrices.
//
//   lecun_unif   entries U(-sqrt(3/d_in), sqrt(3/d_in))
//   lecun_gauss  entries N(0, 1/d_in)
//   orth_*       uniform or gaussian base matrix orthogonalized by QR, so the
//                smaller-side Gram matrix is the identity
//   xavier       entries U(+-sqrt(6/(d_in + d_out)))
//   msra         entries N(0, 2/d_out) for hidden layers, N(0, 1/d_out) for
//                the final linear layer
MatrixList init_weights(const std::vector<int>& dims, const InitScheme& scheme,
                        std::uint64_t seed);

// Same draw as init_weights, then each matrix rescaled to unit Frobenius
// norm. Useful when the analysis wants max_i ||W_i||_F = 1 exactly.
MatrixList normalized_init(const std::vector<int>& dims, const InitScheme& scheme,
                           std::uint64_t seed);

}  // namespace sigadmm
