// Copyright 2026 The rcmlab authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcmlab/matrix_io.hpp"
#include "rcmlab/model.hpp"

namespace rcmlab {

// Scatter plot of a spectrum in the square [-1.6, 1.6]^2 with the dashed unit
// circle as reference. Math orientation: imaginary axis points up.
inline std::string spectrum_svg(const std::vector<Complex>& eigenvalues) {
  if (eigenvalues.empty()) throw std::invalid_argument("spectrum_svg: empty spectrum");
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"640\" "
      "viewBox=\"-1.6 -1.6 3.2 3.2\">\n";
  svg += "  <rect x=\"-1.6\" y=\"-1.6\" width=\"3.2\" height=\"3.2\" fill=\"white\"/>\n";
  svg +=
      "  <line x1=\"-1.6\" y1=\"0\" x2=\"1.6\" y2=\"0\" stroke=\"#cccccc\" "
      "stroke-width=\"0.004\"/>\n";
  svg +=
      "  <line x1=\"0\" y1=\"-1.6\" x2=\"0\" y2=\"1.6\" stroke=\"#cccccc\" "
      "stroke-width=\"0.004\"/>\n";
  svg +=
      "  <circle class=\"unit-circle\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"red\" "
      "stroke-width=\"0.009\" stroke-dasharray=\"0.06 0.04\"/>\n";
  for (const Complex& z : eigenvalues) {
    svg += "  <circle class=\"eig\" cx=\"" + format_double(z.real()) + "\" cy=\"" +
           format_double(-z.imag()) + "\" r=\"0.014\" fill=\"#1f4e79\" fill-opacity=\"0.6\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void plot_spectrum(const std::vector<Complex>& eigenvalues, const std::string& out_path) {
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("plot_spectrum: cannot open " + out_path);
  out << spectrum_svg(eigenvalues);
  if (!out) throw std::runtime_error("plot_spectrum: write failed for " + out_path);
}

}  // namespace rcmlab
