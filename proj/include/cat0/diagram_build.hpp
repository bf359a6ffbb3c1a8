#pragma once

#include "cat0/diagram.hpp"

#include <optional>

namespace cat0 {

/// An oriented edge of the target complex.
struct TargetDart {
    int edge = -1;
    bool forward = true;

    int tail(const Complex2PE& X) const {
        return forward ? X.edge(edge).v0 : X.edge(edge).v1;
    }
    int head(const Complex2PE& X) const {
        return forward ? X.edge(edge).v1 : X.edge(edge).v0;
    }
    TargetDart reversed() const { return TargetDart{edge, !forward}; }
    bool operator==(const TargetDart& o) const = default;
};

/// Parses a cyclic vertex-id walk into a closed dart path (edges looked up
/// between consecutive vertices; ambiguous multi-edges take the first).
std::vector<TargetDart> loop_from_vertices(const Complex2PE& X,
                                           const std::vector<std::string>& vertex_ids);

/// Incremental surgical construction of a disc diagram filling a loop: a
/// boundary word of darts around the unfilled region, shrunk by attaching
/// cells along single edges and by zipping adjacent mirror darts.
class DiagramAssembler {
  public:
    DiagramAssembler(const Complex2PE& X, const std::vector<TargetDart>& loop);

    int boundary_size() const;
    TargetDart boundary_target(int k) const;

    bool can_zip(int k) const; // positions k and k+1 fold together
    void zip(int k);

    struct AttachOption {
        int cell = -1;
        int side = -1;
        int orient = 1;
        bool operator==(const AttachOption& o) const = default;
    };
    std::vector<AttachOption> attach_options(int k) const;
    void attach(int k, const AttachOption& opt);

    bool closed() const;
    int cells_used() const;

    /// The finished (validated) diagram with its map; requires closed().
    DiagramMap finish() const;

    /// Canonical fingerprint of the boundary word (for search memoization).
    std::string boundary_key() const;

    struct Impl;
    std::shared_ptr<Impl> impl; // copyable snapshots for search

  private:
    const Complex2PE* X_;
};

/// Bounded search for a reduced disc diagram filling the loop; iterative
/// deepening over the number of 2-cells with memoization on boundary words.
/// Throws NotClosed for open paths and Exceeded when no filling with at most
/// max_cells cells is found.
DiagramMap build_reduced_disc_diagram(const Complex2PE& X, const std::vector<TargetDart>& loop,
                                      int max_cells);

struct CancelablePair {
    int face_a = -1, face_b = -1; // filled faces (may coincide)
    int edge = -1;                // shared diagram edge
};

/// A pair of 2-cells meeting along an edge whose boundary cycles from that
/// edge map to identical target paths but differ in the diagram; absent iff
/// the map is reduced.
std::optional<CancelablePair> find_cancelable_pair(const DiagramMap& M);

/// Iteratively excises cancelable pairs and sews the slit shut.  The image
/// boundary word is unchanged and the 2-cell count strictly decreases per
/// step.
DiagramMap reduce_diagram(const DiagramMap& M);

/// Boundary word of the outer face in the target, starting from an arbitrary
/// basepoint (canonicalized to the lexicographically minimal rotation when
/// `canonical` is set).
std::vector<TargetDart> boundary_word(const DiagramMap& M, bool canonical = false);

} // namespace cat0
