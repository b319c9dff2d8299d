#include "couplekit/dca/heatmap.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "couplekit/core/dataset.hpp"
#include "couplekit/core/errors.hpp"

namespace couplekit::dca {

namespace {

constexpr int kCell = 46;
constexpr int kLabelW = 92;
constexpr int kLabelH = 64;
constexpr int kTitleH = 40;

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string heatmap_svg(const Eigen::MatrixXd& matrix, const Eigen::MatrixXi& mask,
                        const std::vector<std::string>& names, const std::string& title) {
  const Eigen::Index n = matrix.rows();
  if (matrix.cols() != n || mask.rows() != n || mask.cols() != n ||
      static_cast<Eigen::Index>(names.size()) != n) {
    throw ArgumentError("heatmap: matrix, mask and names must agree in size");
  }

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (mask(i, j)) continue;
      if (first) {
        lo = hi = matrix(i, j);
        first = false;
      } else {
        lo = std::min(lo, matrix(i, j));
        hi = std::max(hi, matrix(i, j));
      }
    }
  }
  const double span = hi - lo;

  const int width = kLabelW + static_cast<int>(n) * kCell + 20;
  const int height = kTitleH + kLabelH + static_cast<int>(n) * kCell + 20;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<style>text{font-family:sans-serif;fill:#222;}"
      << ".t{font-size:15px;font-weight:bold;}"
      << ".s{font-size:11px;fill:#555;}"
      << ".l{font-size:12px;}</style>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text class=\"t\" x=\"10\" y=\"20\">" << escape_xml(title) << "</text>\n";
  svg << "<text class=\"s\" x=\"10\" y=\"36\">scale: min=" << core::format_double(lo)
      << " (light), max=" << core::format_double(hi)
      << " (dark); crossed = not defined / unavailable</text>\n";

  // Column labels (perturbed variable), rotated above the grid.
  for (Eigen::Index j = 0; j < n; ++j) {
    const int cx = kLabelW + static_cast<int>(j) * kCell + kCell / 2;
    const int cy = kTitleH + kLabelH - 8;
    svg << "<text class=\"l\" x=\"" << cx << "\" y=\"" << cy << "\" text-anchor=\"start\" "
        << "transform=\"rotate(-45 " << cx << " " << cy << ")\">" << escape_xml(names[j])
        << "</text>\n";
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = kTitleH + kLabelH + static_cast<int>(i) * kCell;
    svg << "<text class=\"l\" x=\"" << kLabelW - 6 << "\" y=\"" << y + kCell / 2 + 4
        << "\" text-anchor=\"end\">" << escape_xml(names[i]) << "</text>\n";
    for (Eigen::Index j = 0; j < n; ++j) {
      const int x = kLabelW + static_cast<int>(j) * kCell;
      if (mask(i, j)) {
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
            << kCell << "\" fill=\"#f2f2f2\" stroke=\"#999\"/>\n";
        svg << "<line x1=\"" << x + 6 << "\" y1=\"" << y + 6 << "\" x2=\"" << x + kCell - 6
            << "\" y2=\"" << y + kCell - 6 << "\" stroke=\"#999\" stroke-width=\"1.5\"/>\n";
        svg << "<line x1=\"" << x + kCell - 6 << "\" y1=\"" << y + 6 << "\" x2=\"" << x + 6
            << "\" y2=\"" << y + kCell - 6 << "\" stroke=\"#999\" stroke-width=\"1.5\"/>\n";
        continue;
      }
      const double t = span > 0.0 ? (matrix(i, j) - lo) / span : 0.0;
      const int shade = 245 - static_cast<int>(t * 205.0);  // darker = larger
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << "\" fill=\"rgb(" << shade << "," << shade << "," << shade
          << ")\" stroke=\"#999\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_heatmap_svg(const std::string& path, const Eigen::MatrixXd& matrix,
                       const Eigen::MatrixXi& mask, const std::vector<std::string>& names,
                       const std::string& title) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write SVG file '" + path + "'");
  out << heatmap_svg(matrix, mask, names, title);
}

}  // namespace couplekit::dca
