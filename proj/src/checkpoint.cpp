#include <cstring>
#include <fstream>
#include <iterator>

#include "rclab/sampler.hpp"

namespace rclab {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'L', 'C'};

enum : std::uint8_t { kRect = 1, kAnnulus = 2, kCustom = 3 };

class Writer {
public:
    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > in_.size()) throw std::runtime_error("checkpoint truncated");
    }
    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
};

}  // namespace

// Layout (little endian): magic "RCLC", u32 version, domain record, f64 p,
// f64 q, u64 |bc| + i32 labels, u64 seed, u64 stream, u64 counter, u64 sweeps,
// u64 edge count, packed edge bits (LSB first).
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& cp) {
    Writer w;
    for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
    w.u32(kCheckpointVersion);
    const Domain& d = *cp.domain;
    if (auto* r = dynamic_cast<const RectDomain*>(&d)) {
        w.u8(kRect);
        w.i32(r->x0());
        w.i32(r->x1());
        w.i32(r->y0());
        w.i32(r->y1());
    } else if (auto* a = dynamic_cast<const AnnulusDomain*>(&d)) {
        w.u8(kAnnulus);
        w.i32(a->center().x);
        w.i32(a->center().y);
        w.i32(a->n1());
        w.i32(a->n2());
    } else {
        w.u8(kCustom);
        w.u64(static_cast<std::uint64_t>(d.edge_count()));
        for (const Edge& e : d.edges()) {
            w.i32(e.a.x);
            w.i32(e.a.y);
            w.i32(e.b.x);
            w.i32(e.b.y);
        }
    }
    w.f64(cp.params.p);
    w.f64(cp.params.q);
    w.u64(cp.bc.size());
    for (int l : cp.bc.label()) w.i32(l);
    w.u64(cp.state.rng.seed());
    w.u64(cp.state.rng.stream());
    w.u64(cp.state.counter);
    w.u64(cp.state.sweeps);
    const auto& bits = cp.state.config.bits();
    w.u64(bits.size());
    std::uint8_t byte = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        byte |= static_cast<std::uint8_t>(bits[i] << (i % 8));
        if (i % 8 == 7) {
            w.u8(byte);
            byte = 0;
        }
    }
    if (bits.size() % 8) w.u8(byte);
    return std::move(w.out);
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    for (char c : kMagic) {
        if (r.u8() != static_cast<std::uint8_t>(c)) throw std::runtime_error("not a checkpoint file");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint cp;
    switch (r.u8()) {
        case kRect: {
            const int x0 = r.i32(), x1 = r.i32(), y0 = r.i32(), y1 = r.i32();
            cp.domain = build_rect(x0, x1, y0, y1);
            break;
        }
        case kAnnulus: {
            const int cx = r.i32(), cy = r.i32(), n1 = r.i32(), n2 = r.i32();
            cp.domain = build_annulus({cx, cy}, n1, n2);
            break;
        }
        case kCustom: {
            const std::uint64_t m = r.u64();
            std::vector<Edge> edges;
            for (std::uint64_t i = 0; i < m; ++i) {
                const int ax = r.i32(), ay = r.i32(), bx = r.i32(), by = r.i32();
                edges.push_back({{ax, ay}, {bx, by}});
            }
            cp.domain = build_custom(std::move(edges));
            break;
        }
        default: throw std::runtime_error("unknown domain kind in checkpoint");
    }
    const double p = r.f64();
    const double q = r.f64();
    cp.params = Params::make(p, q);
    const std::uint64_t nbc = r.u64();
    if (nbc != cp.domain->boundary().size()) throw std::runtime_error("checkpoint boundary size mismatch");
    std::vector<int> labels;
    for (std::uint64_t i = 0; i < nbc; ++i) labels.push_back(r.i32());
    cp.bc = BoundaryCondition::from_labels(std::move(labels));
    const std::uint64_t seed = r.u64();
    const std::uint64_t stream = r.u64();
    cp.state.rng = CounterRng(seed, stream);
    cp.state.counter = r.u64();
    cp.state.sweeps = r.u64();
    const std::uint64_t nbits = r.u64();
    if (nbits != static_cast<std::uint64_t>(cp.domain->edge_count())) {
        throw std::runtime_error("checkpoint edge count mismatch");
    }
    cp.state.config = Configuration(cp.domain);
    std::uint8_t byte = 0;
    for (std::uint64_t i = 0; i < nbits; ++i) {
        if (i % 8 == 0) byte = r.u8();
        cp.state.config.set(static_cast<int>(i), (byte >> (i % 8)) & 1U);
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in checkpoint");
    return cp;
}

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
    const auto bytes = encode_checkpoint(cp);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace rclab
