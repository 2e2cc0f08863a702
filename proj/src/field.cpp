#include "eigenseg/field.hpp"

#include <algorithm>
#include <cmath>

namespace eigenseg {

ScalarField::ScalarField(int w, int h, double fill)
    : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {
    if (w < 2 || h < 1) {
        throw ContractError("ScalarField requires width >= 2 and height >= 1");
    }
}

double ScalarField::spacing() const {
    return 1.0 / (std::max(width, height) - 1);
}

void ScalarField::validate() const {
    if (width < 2 || height < 1) {
        throw ContractError("ScalarField requires width >= 2 and height >= 1");
    }
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw ContractError("ScalarField value count does not match width*height");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ContractError("ScalarField contains a non-finite value");
        }
    }
}

double DomainMask::spacing() const {
    return 1.0 / (std::max(width, height) - 1);
}

void DomainMask::build_index() {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    interior_index.assign(n, -1);
    interior_nodes.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == NodeLabel::interior) {
            interior_index[i] = static_cast<int>(interior_nodes.size());
            interior_nodes.push_back(static_cast<int>(i));
        }
    }
}

DomainMask DomainMask::full(int w, int h) {
    if (w < 2 || h < 1) {
        throw ContractError("mask requires width >= 2 and height >= 1");
    }
    DomainMask m;
    m.width = w;
    m.height = h;
    m.labels.assign(static_cast<std::size_t>(w) * h, NodeLabel::interior);
    if (h == 1) {
        m.labels[0] = NodeLabel::boundary;
        m.labels[w - 1] = NodeLabel::boundary;
    } else {
        for (int x = 0; x < w; ++x) {
            m.labels[x] = NodeLabel::boundary;
            m.labels[static_cast<std::size_t>(h - 1) * w + x] = NodeLabel::boundary;
        }
        for (int y = 0; y < h; ++y) {
            m.labels[static_cast<std::size_t>(y) * w] = NodeLabel::boundary;
            m.labels[static_cast<std::size_t>(y) * w + (w - 1)] = NodeLabel::boundary;
        }
    }
    m.build_index();
    m.validate();
    return m;
}

DomainMask DomainMask::from_foreground(const ScalarField& fg) {
    DomainMask m;
    m.width = fg.width;
    m.height = fg.height;
    const std::size_t n = fg.size();
    m.labels.assign(n, NodeLabel::excluded);

    auto foreground = [&](int x, int y) {
        if (x < 0 || x >= fg.width || y < 0 || y >= fg.height) return false;
        return fg.at(x, y) >= 0.5;
    };

    for (int y = 0; y < fg.height; ++y) {
        for (int x = 0; x < fg.width; ++x) {
            if (!foreground(x, y)) continue;
            bool frontier = x == 0 || x == fg.width - 1 ||
                            !foreground(x - 1, y) || !foreground(x + 1, y);
            if (fg.height > 1) {
                frontier = frontier || y == 0 || y == fg.height - 1 ||
                           !foreground(x, y - 1) || !foreground(x, y + 1);
            }
            m.labels[static_cast<std::size_t>(y) * fg.width + x] =
                frontier ? NodeLabel::boundary : NodeLabel::interior;
        }
    }
    m.build_index();
    m.validate();
    return m;
}

void DomainMask::validate() const {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (labels.size() != n || interior_index.size() != n) {
        throw ContractError("mask arrays do not match width*height");
    }
    if (interior_nodes.empty()) {
        throw ContractError("mask has no interior node");
    }
    // interior_index must be the inverse of interior_nodes (bijection).
    for (std::size_t i = 0; i < interior_nodes.size(); ++i) {
        const int node = interior_nodes[i];
        if (node < 0 || static_cast<std::size_t>(node) >= n ||
            labels[node] != NodeLabel::interior ||
            interior_index[node] != static_cast<int>(i)) {
            throw ContractError("mask interior index is not a bijection");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_int = labels[i] == NodeLabel::interior;
        if (is_int != (interior_index[i] >= 0)) {
            throw ContractError("mask interior index inconsistent with labels");
        }
    }
    // No interior node may touch an excluded node or the grid frame.
    for (int node : interior_nodes) {
        const int x = node % width;
        const int y = node / width;
        if (x == 0 || x == width - 1 || (height > 1 && (y == 0 || y == height - 1))) {
            throw ContractError("interior node on the grid frame");
        }
        const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
        const int count = height == 1 ? 2 : 4;
        for (int q = 0; q < count; ++q) {
            if (label(nb[q][0], nb[q][1]) == NodeLabel::excluded) {
                throw ContractError("interior node adjacent to an excluded node");
            }
        }
    }
}

ScalarField GradientField::magnitude_squared() const {
    ScalarField out(width, height);
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double y = gy.empty() ? 0.0 : gy[i];
        out.values[i] = gx[i] * gx[i] + y * y;
    }
    return out;
}

GradientField gradient(const ScalarField& field, const DomainMask& mask) {
    if (!mask.same_shape(field)) {
        throw ContractError("gradient: field and mask dimensions differ");
    }
    const int w = field.width;
    const int h = field.height;
    const double step = field.spacing();
    GradientField g;
    g.width = w;
    g.height = h;
    g.gx.assign(field.size(), 0.0);
    g.gy.assign(field.size(), 0.0);

    auto inside = [&](int x, int y) {
        if (x < 0 || x >= w || y < 0 || y >= h) return false;
        return mask.label(x, y) != NodeLabel::excluded;
    };
    auto diff = [&](double lo, double mid, double hi, bool has_lo, bool has_hi) {
        if (has_lo && has_hi) return (hi - lo) / (2.0 * step);
        if (has_hi) return (hi - mid) / step;
        if (has_lo) return (mid - lo) / step;
        return 0.0;
    };

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (mask.labels[i] == NodeLabel::excluded) continue;
            const double v = field.values[i];
            const bool xl = inside(x - 1, y), xr = inside(x + 1, y);
            g.gx[i] = diff(xl ? field.at(x - 1, y) : 0.0, v,
                           xr ? field.at(x + 1, y) : 0.0, xl, xr);
            if (h > 1) {
                const bool yl = inside(x, y - 1), yr = inside(x, y + 1);
                g.gy[i] = diff(yl ? field.at(x, y - 1) : 0.0, v,
                               yr ? field.at(x, y + 1) : 0.0, yl, yr);
            }
        }
    }
    return g;
}

double inner_product(const ScalarField& a, const ScalarField& b, const DomainMask& mask) {
    if (!a.same_shape(b) || !mask.same_shape(a)) {
        throw ContractError("inner_product: dimension mismatch");
    }
    double sum = 0.0;
    for (int node : mask.interior_nodes) {
        sum += a.values[node] * b.values[node];
    }
    const double h = a.spacing();
    return (mask.dim() == 1 ? h : h * h) * sum;
}

}  // namespace eigenseg
