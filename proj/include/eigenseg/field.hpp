#pragma once

#include <cstdint>
#include <vector>

#include "eigenseg/errors.hpp"

namespace eigenseg {

/// Real-valued function sampled on a uniform grid (an image, a weight
/// field, an eigenfunction). Row-major storage, index = y*width + x.
/// height == 1 means a one-dimensional grid. The domain is normalized so
/// the longest axis spans [0,1]: spacing h = 1/(max(width,height)-1).
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0);

    int dim() const { return height == 1 ? 1 : 2; }
    std::size_t size() const { return values.size(); }
    double spacing() const;

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    bool same_shape(const ScalarField& other) const {
        return width == other.width && height == other.height;
    }

    /// Throws ContractError on non-finite values or inconsistent sizes.
    void validate() const;
};

enum class NodeLabel : std::uint8_t { interior = 0, boundary = 1, excluded = 2 };

/// Per-node classification of the grid into the open domain, its boundary,
/// and nodes outside the region of interest. Interior nodes get a dense
/// 0..N-1 numbering in row-major order.
struct DomainMask {
    int width = 0;
    int height = 0;
    std::vector<NodeLabel> labels;
    std::vector<int> interior_index;   // node -> interior ordinal, -1 otherwise
    std::vector<int> interior_nodes;   // interior ordinal -> node

    int dim() const { return height == 1 ? 1 : 2; }
    int interior_count() const { return static_cast<int>(interior_nodes.size()); }
    double spacing() const;

    NodeLabel label(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }

    bool same_shape(const ScalarField& f) const {
        return width == f.width && height == f.height;
    }

    /// Full rectangle: the outer ring of nodes (the two end nodes in 1-D)
    /// is the boundary, everything else interior.
    static DomainMask full(int w, int h);

    /// Region of interest from a foreground map (>= 0.5 is foreground).
    /// Foreground nodes adjacent to background or to the image frame become
    /// the boundary; the rest of the foreground is interior.
    static DomainMask from_foreground(const ScalarField& fg);

    /// Enforces the structural invariants: at least one interior node, no
    /// interior node adjacent to an excluded node, index maps consistent.
    void validate() const;

private:
    void build_index();
};

/// Per-node gradient. gy is all zeros for 1-D grids.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;

    /// |grad|^2 per node as a ScalarField.
    ScalarField magnitude_squared() const;
};

/// Central differences where both neighbors along an axis are inside the
/// domain (interior or boundary), one-sided differences at domain edges,
/// zero at excluded nodes.
GradientField gradient(const ScalarField& field, const DomainMask& mask);

/// Mesh inner product h^d * sum over interior nodes of a*b.
double inner_product(const ScalarField& a, const ScalarField& b, const DomainMask& mask);

}  // namespace eigenseg
