#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fuplab {

/// Affine map identifying cell (i_1..i_d) with the cube
/// prod_j [offset_j + scale*i_j, offset_j + scale*(i_j+1)].
///
/// Conventions used throughout: physical sets live in [-1,1]^d
/// (offset = -1, scale = 2/N); frequency sets live in [-N/2, N/2]^d
/// (offset = -N/2, scale = 1).
struct Embedding {
    std::vector<double> offset;
    double scale = 1.0;
};

/// A finite union of lattice cells representing a fractal set at a fixed
/// resolution. Immutable after construction; safe to share across threads.
class GridSet {
public:
    static constexpr std::size_t kDefaultCellCap = 10'000'000;

    GridSet(int dim, std::int64_t side, Embedding emb);

    int dim() const { return dim_; }
    std::int64_t side() const { return side_; }
    const Embedding& embedding() const { return emb_; }
    std::size_t cell_count() const { return count_; }
    bool empty() const { return count_ == 0; }
    std::size_t total_cells() const { return total_; }
    double cell_width() const { return emb_.scale; }

    /// Set when an operation produced a degenerate result (e.g. a translation
    /// pushed every cell out of range).
    bool warning() const { return warning_; }

    std::size_t index_of(const std::vector<std::int64_t>& coords) const;
    std::vector<std::int64_t> coords_of(std::size_t idx) const;

    bool test(std::size_t idx) const {
        return (bits_[idx >> 6] >> (idx & 63)) & 1u;
    }
    bool test(const std::vector<std::int64_t>& coords) const {
        return test(index_of(coords));
    }
    void set(std::size_t idx);
    void set(const std::vector<std::int64_t>& coords) { set(index_of(coords)); }

    /// Center of a cell in embedded coordinates.
    std::vector<double> cell_center(const std::vector<std::int64_t>& coords) const;
    /// Low corner of the embedded bounding box.
    std::vector<double> box_lo() const;
    std::vector<double> box_hi() const;

    const std::vector<std::uint64_t>& raw_bits() const { return bits_; }

    GridSet with_embedding(Embedding emb) const;
    GridSet& mark_warning() { warning_ = true; return *this; }

    bool same_cells(const GridSet& other) const;

    /// Iterate occupied cells; f(coords).
    template <typename F>
    void for_each_cell(F&& f) const {
        std::vector<std::int64_t> c(dim_);
        for (std::size_t idx = 0; idx < total_; ++idx) {
            if (!test(idx)) continue;
            std::size_t rem = idx;
            for (int j = dim_ - 1; j >= 0; --j) {
                c[j] = static_cast<std::int64_t>(rem % side_);
                rem /= side_;
            }
            f(c);
        }
    }

private:
    int dim_;
    std::int64_t side_;
    Embedding emb_;
    std::size_t total_;
    std::vector<std::uint64_t> bits_;
    std::size_t count_ = 0;
    bool warning_ = false;
};

/// Base-L digit construction: dim axes, per-axis kept digit subsets, depth n.
struct CantorSpec {
    int dim = 1;
    int base = 3;
    std::vector<std::vector<int>> kept_digits;  // one subset per axis
    int depth = 1;

    std::int64_t side() const;
    void validate(std::size_t cell_cap) const;
};

GridSet gen_cantor_product(const CantorSpec& spec,
                           std::size_t cell_cap = GridSet::kDefaultCellCap);

/// 2D set on a 3^depth grid; a cell is kept iff no base-3 digit pair of its
/// coordinates equals (1,1).
GridSet gen_sierpinski(int depth,
                       std::size_t cell_cap = GridSet::kDefaultCellCap);

/// All cells within Chebyshev distance r of a cell of s, clipped to the grid.
GridSet thicken(const GridSet& s, std::int64_t r);

/// Scales the embedding only; cells unchanged.
GridSet dilate(const GridSet& s, double factor);

/// Shift cells by an integer vector, clipping to [0, N)^d. An empty result
/// carries a warning flag.
GridSet translate(const GridSet& s, const std::vector<std::int64_t>& shift);

/// .gset persistence: magic "GSET1", dim (u8), side (u64 LE), embedding
/// offset (dim doubles LE) and scale (double LE), then ceil(N^d/8) bitmap
/// bytes in row-major order (axis 0 slowest), bit i of byte B = cell 8B+i.
void save_gset(const GridSet& s, const std::string& path);
GridSet load_gset(const std::string& path);
void save_gset(const GridSet& s, std::ostream& out);
GridSet load_gset(std::istream& in);

Embedding physical_embedding(int dim, std::int64_t side);   // [-1,1]^d
Embedding frequency_embedding(int dim, std::int64_t side);  // [-N/2,N/2]^d

}  // namespace fuplab
