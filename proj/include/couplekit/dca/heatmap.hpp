#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace couplekit::dca {

/// Grid heatmap as a standalone SVG string: darker cells for larger
/// entries, crossed-out cells for masked entries, min-max grayscale per
/// matrix with the scale annotated under the title.
std::string heatmap_svg(const Eigen::MatrixXd& matrix, const Eigen::MatrixXi& mask,
                        const std::vector<std::string>& names, const std::string& title);

void write_heatmap_svg(const std::string& path, const Eigen::MatrixXd& matrix,
                       const Eigen::MatrixXi& mask, const std::vector<std::string>& names,
                       const std::string& title);

}  // namespace couplekit::dca
