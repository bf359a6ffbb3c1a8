#pragma once

#include "cat0/complex.hpp"

#include <nlohmann/json_fwd.hpp>

namespace cat0 {

/// A diagram: finite connected combinatorial 2-complex with a fixed planar
/// (spherical) embedding given by a rotation system.  Encoded with darts:
/// edge e owns darts 2e (tail = v0) and 2e+1 (tail = v1); `next` is the
/// counterclockwise successor around the tail vertex.  Faces are the orbits
/// of d -> next(twin(d)) and carry the face on the left of each dart; filled
/// faces are 2-cells with planar geometry pulled back from a target complex,
/// unfilled faces are the complementary regions (outer face and holes).
class DiscDiagram {
  public:
    struct Dart {
        int next = -1;
        int tail = -1;
    };

    struct Face {
        bool filled = false;
        std::vector<int> cycle;  // darts, face on the left
        std::vector<Vec2> coords; // filled faces: position of tail(cycle[k])
    };

    DiscDiagram() = default;
    DiscDiagram(std::vector<std::string> vertex_ids, std::vector<std::string> edge_ids,
                std::vector<Dart> darts, int outer_dart);

    static int twin(int d) { return d ^ 1; }
    int next(int d) const { return darts_[d].next; }
    int tail(int d) const { return darts_[d].tail; }
    int head(int d) const { return darts_[twin(d)].tail; }
    int edge_of(int d) const { return d / 2; }
    int dart_count() const { return static_cast<int>(darts_.size()); }
    int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
    int edge_count() const { return static_cast<int>(edge_ids_.size()); }
    int face_count() const { return static_cast<int>(faces_.size()); }
    int cell_count() const; // filled faces

    const std::string& vertex_id(int v) const { return vertex_ids_[v]; }
    const std::string& edge_id(int e) const { return edge_ids_[e]; }
    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;
    const Face& face(int f) const { return faces_[f]; }
    int face_of_dart(int d) const { return face_of_[d]; }
    int outer_face() const { return outer_face_; }
    std::vector<int> unfilled_faces() const; // outer face first

    /// Marks a face as filled and installs its pulled-back polygon; coords[k]
    /// is the position of tail(cycle[k]).
    void fill_face(int f, std::vector<Vec2> coords);
    void set_outer(int f);

    double corner_angle(int f, int k) const;
    double edge_length(int e) const; // from any adjacent filled face
    int euler_characteristic() const;

    std::vector<int> darts_at_vertex(int v) const;
    /// Corners of filled faces at v, as (face, position) pairs.
    std::vector<std::pair<int, int>> corners_at_vertex(int v) const;

    /// chi(Lk(v)) = (#darts at v) - (#corners at v): 0 on circles, +1 per arc.
    int link_euler_characteristic(int v) const;

    /// Requires the rotation system to embed in the sphere with chi = 2 and
    /// the diagram to be connected; throws on violation.
    void validate() const;

    /// True disc diagram: exactly one unfilled face and chi(D) = 1.
    bool is_disc() const;

  private:
    friend class DiagramBuilder;
    void rebuild_faces();

    std::vector<std::string> vertex_ids_, edge_ids_;
    std::vector<Dart> darts_;
    std::vector<Face> faces_;
    std::vector<int> face_of_;
    int outer_face_ = -1;
};

/// Curvature at a vertex: 2*pi - pi*chi(Lk(v,D)) - sum of corner angles.
double vertex_curvature(const DiscDiagram& D, int v);
double vertex_curvature(const DiscDiagram& D, const std::string& vertex_id);

/// | sum of curvatures - 2*pi*chi(D) |; exactly the combinatorial
/// Gauss-Bonnet defect, which vanishes for every diagram.
double gauss_bonnet_residual(const DiscDiagram& D);

/// A combinatorial map from a diagram to a piecewise Euclidean complex:
/// cell-to-cell, edge-to-edge, vertex-to-vertex, restricting to a bijection
/// on each open cell.  The target is referenced, not owned: it must outlive
/// the map.
struct DiagramMap {
    DiscDiagram D;
    const Complex2PE* target = nullptr;
    std::vector<int> vertex_image;  // diagram vertex -> target vertex
    std::vector<int> edge_image;    // diagram edge -> target edge
    std::vector<bool> edge_forward; // primary dart 2e maps to target v0->v1?

    struct CellImage {
        int cell = -1;   // target cell
        int start = 0;   // side of target matched by cycle[0]
        int orient = 1;  // +1: cycle follows the target boundary ccw
    };
    std::vector<CellImage> cell_images; // per face (unfilled faces: cell = -1)

    /// Target dart of a diagram dart, as (edge, forward).
    std::pair<int, bool> dart_image(int d) const;

    /// Recomputes cell images from the edge images and installs pulled-back
    /// polygons on all filled faces.  Throws if some face's image cycle does
    /// not traverse the boundary of a single target cell.
    void pull_back_geometry();

    /// Full consistency check: metric pullback and combinatorial soundness.
    void validate() const;

    /// The diagram as a piecewise Euclidean complex (cells from filled
    /// faces).  Requires every edge to bound a filled face.
    Complex2PE as_complex() const;

    nlohmann::json to_json() const;
    static DiagramMap from_json(const nlohmann::json& doc, const Complex2PE& target);
};

/// Identity-style diagram over a disc-like subcomplex of X: every edge of
/// the subcomplex bounds at most two of its cells, vertex links are arcs or
/// circles, and the result is a disc.  Throws BadParams otherwise.
DiagramMap diagram_from_subcomplex(const Complex2PE& X, const std::vector<int>& cells);

} // namespace cat0
