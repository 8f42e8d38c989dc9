#include "fuplab/grid_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fuplab {

namespace {

std::size_t checked_total(int dim, std::int64_t side) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridSet: dim must be 1..3");
    if (side < 1) throw std::invalid_argument("GridSet: side must be positive");
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) {
        if (total > SIZE_MAX / static_cast<std::size_t>(side))
            throw std::invalid_argument("GridSet: N^d overflows");
        total *= static_cast<std::size_t>(side);
    }
    return total;
}

void check_cap(int dim, std::int64_t side, std::size_t cap) {
    std::size_t total = checked_total(dim, side);
    if (total > cap) {
        std::ostringstream msg;
        msg << "grid of " << total << " cells exceeds the memory cap of " << cap;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

GridSet::GridSet(int dim, std::int64_t side, Embedding emb)
    : dim_(dim), side_(side), emb_(std::move(emb)), total_(checked_total(dim, side)) {
    if (static_cast<int>(emb_.offset.size()) != dim_)
        throw std::invalid_argument("GridSet: embedding offset size mismatch");
    if (!(emb_.scale > 0.0))
        throw std::invalid_argument("GridSet: embedding scale must be positive");
    bits_.assign((total_ + 63) / 64, 0);
}

std::size_t GridSet::index_of(const std::vector<std::int64_t>& coords) const {
    std::size_t idx = 0;
    for (int j = 0; j < dim_; ++j) {
        if (coords[j] < 0 || coords[j] >= side_)
            throw std::out_of_range("GridSet: cell coordinate out of range");
        idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(coords[j]);
    }
    return idx;
}

std::vector<std::int64_t> GridSet::coords_of(std::size_t idx) const {
    std::vector<std::int64_t> c(dim_);
    for (int j = dim_ - 1; j >= 0; --j) {
        c[j] = static_cast<std::int64_t>(idx % side_);
        idx /= side_;
    }
    return c;
}

void GridSet::set(std::size_t idx) {
    std::uint64_t& word = bits_[idx >> 6];
    std::uint64_t mask = 1ull << (idx & 63);
    if (!(word & mask)) {
        word |= mask;
        ++count_;
    }
}

std::vector<double> GridSet::cell_center(const std::vector<std::int64_t>& coords) const {
    std::vector<double> p(dim_);
    for (int j = 0; j < dim_; ++j)
        p[j] = emb_.offset[j] + emb_.scale * (static_cast<double>(coords[j]) + 0.5);
    return p;
}

std::vector<double> GridSet::box_lo() const { return emb_.offset; }

std::vector<double> GridSet::box_hi() const {
    std::vector<double> hi(dim_);
    for (int j = 0; j < dim_; ++j)
        hi[j] = emb_.offset[j] + emb_.scale * static_cast<double>(side_);
    return hi;
}

GridSet GridSet::with_embedding(Embedding emb) const {
    GridSet out(dim_, side_, std::move(emb));
    out.bits_ = bits_;
    out.count_ = count_;
    out.warning_ = warning_;
    return out;
}

bool GridSet::same_cells(const GridSet& other) const {
    return dim_ == other.dim_ && side_ == other.side_ && bits_ == other.bits_;
}

std::int64_t CantorSpec::side() const {
    std::int64_t s = 1;
    for (int i = 0; i < depth; ++i) s *= base;
    return s;
}

void CantorSpec::validate(std::size_t cap) const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("CantorSpec: dim must be 1..3");
    if (base < 3) throw std::invalid_argument("CantorSpec: base must be >= 3");
    if (depth < 1) throw std::invalid_argument("CantorSpec: depth must be positive");
    if (static_cast<int>(kept_digits.size()) != dim)
        throw std::invalid_argument("CantorSpec: need one digit set per axis");
    for (const auto& ds : kept_digits) {
        if (ds.empty()) throw std::invalid_argument("CantorSpec: kept digit set empty");
        for (int d : ds)
            if (d < 0 || d >= base)
                throw std::invalid_argument("CantorSpec: digit out of range");
    }
    check_cap(dim, side(), cap);
}

GridSet gen_cantor_product(const CantorSpec& spec, std::size_t cap) {
    spec.validate(cap);
    std::int64_t side = spec.side();
    GridSet out(spec.dim, side, physical_embedding(spec.dim, side));

    // Per-axis admissible coordinates: digits of the base-L expansion all kept.
    std::vector<std::vector<std::int64_t>> axis_coords(spec.dim);
    for (int j = 0; j < spec.dim; ++j) {
        std::vector<std::int64_t> cur{0};
        for (int lvl = 0; lvl < spec.depth; ++lvl) {
            std::vector<std::int64_t> next;
            next.reserve(cur.size() * spec.kept_digits[j].size());
            for (std::int64_t c : cur)
                for (int d : spec.kept_digits[j])
                    next.push_back(c * spec.base + d);
            cur = std::move(next);
        }
        std::sort(cur.begin(), cur.end());
        axis_coords[j] = std::move(cur);
    }

    std::vector<std::size_t> pick(spec.dim, 0);
    std::vector<std::int64_t> coords(spec.dim);
    while (true) {
        for (int j = 0; j < spec.dim; ++j) coords[j] = axis_coords[j][pick[j]];
        out.set(coords);
        int j = spec.dim - 1;
        while (j >= 0 && ++pick[j] == axis_coords[j].size()) pick[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

GridSet gen_sierpinski(int depth, std::size_t cap) {
    if (depth < 1) throw std::invalid_argument("gen_sierpinski: depth must be >= 1");
    std::int64_t side = 1;
    for (int i = 0; i < depth; ++i) side *= 3;
    check_cap(2, side, cap);
    GridSet out(2, side, physical_embedding(2, side));
    std::vector<std::int64_t> c(2);
    for (std::int64_t x = 0; x < side; ++x) {
        for (std::int64_t y = 0; y < side; ++y) {
            std::int64_t a = x, b = y;
            bool keep = true;
            for (int lvl = 0; lvl < depth; ++lvl) {
                if (a % 3 == 1 && b % 3 == 1) { keep = false; break; }
                a /= 3;
                b /= 3;
            }
            if (keep) {
                c[0] = x;
                c[1] = y;
                out.set(c);
            }
        }
    }
    return out;
}

GridSet thicken(const GridSet& s, std::int64_t r) {
    if (r < 0) throw std::invalid_argument("thicken: r must be nonnegative");
    GridSet out(s.dim(), s.side(), s.embedding());
    if (r == 0 || s.empty()) {
        if (!s.empty())
            s.for_each_cell([&](const std::vector<std::int64_t>& c) { out.set(c); });
        return out;
    }
    std::int64_t side = s.side();
    std::vector<std::int64_t> q(s.dim());
    s.for_each_cell([&](const std::vector<std::int64_t>& c) {
        // Chebyshev ball of radius r around c, clipped to the grid.
        std::vector<std::int64_t> lo(s.dim()), hi(s.dim());
        for (int j = 0; j < s.dim(); ++j) {
            lo[j] = std::max<std::int64_t>(0, c[j] - r);
            hi[j] = std::min<std::int64_t>(side - 1, c[j] + r);
        }
        q = lo;
        while (true) {
            out.set(q);
            int j = s.dim() - 1;
            while (j >= 0 && ++q[j] > hi[j]) {
                q[j] = lo[j];
                --j;
            }
            if (j < 0) break;
        }
    });
    return out;
}

GridSet dilate(const GridSet& s, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
    Embedding emb = s.embedding();
    emb.scale *= factor;
    for (double& o : emb.offset) o *= factor;
    return s.with_embedding(std::move(emb));
}

GridSet translate(const GridSet& s, const std::vector<std::int64_t>& shift) {
    if (static_cast<int>(shift.size()) != s.dim())
        throw std::invalid_argument("translate: shift dimension mismatch");
    GridSet out(s.dim(), s.side(), s.embedding());
    std::vector<std::int64_t> q(s.dim());
    s.for_each_cell([&](const std::vector<std::int64_t>& c) {
        for (int j = 0; j < s.dim(); ++j) {
            q[j] = c[j] + shift[j];
            if (q[j] < 0 || q[j] >= s.side()) return;
        }
        out.set(q);
    });
    if (out.empty() && !s.empty()) out.mark_warning();
    return out;
}

namespace {

template <typename T>
void write_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw std::runtime_error("gset: truncated stream");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

}  // namespace

void save_gset(const GridSet& s, std::ostream& out) {
    out.write("GSET1", 5);
    unsigned char d = static_cast<unsigned char>(s.dim());
    out.write(reinterpret_cast<const char*>(&d), 1);
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.side()));
    for (int j = 0; j < s.dim(); ++j) write_le<double>(out, s.embedding().offset[j]);
    write_le<double>(out, s.embedding().scale);
    std::size_t nbytes = (s.total_cells() + 7) / 8;
    const auto& words = s.raw_bits();
    for (std::size_t b = 0; b < nbytes; ++b) {
        unsigned char byte =
            static_cast<unsigned char>((words[b / 8] >> ((b % 8) * 8)) & 0xFF);
        out.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

GridSet load_gset(std::istream& in) {
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "GSET1", 5) != 0)
        throw std::runtime_error("gset: bad magic");
    unsigned char d;
    in.read(reinterpret_cast<char*>(&d), 1);
    std::uint64_t side = read_le<std::uint64_t>(in);
    Embedding emb;
    emb.offset.resize(d);
    for (int j = 0; j < d; ++j) emb.offset[j] = read_le<double>(in);
    emb.scale = read_le<double>(in);
    GridSet s(d, static_cast<std::int64_t>(side), std::move(emb));
    std::size_t nbytes = (s.total_cells() + 7) / 8;
    for (std::size_t b = 0; b < nbytes; ++b) {
        unsigned char byte;
        in.read(reinterpret_cast<char*>(&byte), 1);
        if (!in) throw std::runtime_error("gset: truncated bitmap");
        for (int i = 0; i < 8; ++i) {
            std::size_t idx = b * 8 + static_cast<std::size_t>(i);
            if (idx < s.total_cells() && ((byte >> i) & 1)) s.set(idx);
        }
    }
    return s;
}

void save_gset(const GridSet& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("gset: cannot open " + path + " for writing");
    save_gset(s, out);
}

GridSet load_gset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("gset: cannot open " + path);
    return load_gset(in);
}

Embedding physical_embedding(int dim, std::int64_t side) {
    Embedding e;
    e.offset.assign(dim, -1.0);
    e.scale = 2.0 / static_cast<double>(side);
    return e;
}

Embedding frequency_embedding(int dim, std::int64_t side) {
    Embedding e;
    e.offset.assign(dim, -static_cast<double>(side) / 2.0);
    e.scale = 1.0;
    return e;
}

}  // namespace fuplab
