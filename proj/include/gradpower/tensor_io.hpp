#ifndef GRADPOWER_TENSOR_IO_HPP
#define GRADPOWER_TENSOR_IO_HPP

#include <string>

#include "gradpower/expansion.hpp"

namespace gradpower {

/// Tensor files are JSON objects:
///
///   { "p": 2, "q": 1,
///     "K":   [[1, 0], [0, 1]],
///     "k3":  [[[..],[..]], [[..],[..]]],
///     "k21": [[[..],[..]], [[..],[..]]],
///     "k111": ... (optional) }
///
/// Nested arrays are indexed [r][s][t]. The result is validated (symmetry to
/// 1e-12 relative, K positive definite).
CumulantTensors<double> parse_tensors(const std::string& text);
CumulantTensors<double> read_tensor_file(const std::string& path);
std::string dump_tensors(const CumulantTensors<double>& t);

} // namespace gradpower

#endif // GRADPOWER_TENSOR_IO_HPP
