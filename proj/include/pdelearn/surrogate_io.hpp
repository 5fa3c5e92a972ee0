#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "pdelearn/errors.hpp"
#include "pdelearn/surrogate.hpp"

namespace pdelearn {

namespace detail {

constexpr char kNetMagic[8] = {'P', 'D', 'L', 'N', 'E', 'T', '0', '1'};

inline void write_doubles(std::ofstream& out, const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}
inline void read_doubles(std::ifstream& in, double* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace detail

/// Flat binary checkpoint: hidden width, parameters, scaling records.
/// Round-trips bit-exactly.
inline void save_surrogate(const std::string& path, const SurrogateNet& net,
                           const AnnScaling& scaling) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write(detail::kNetMagic, sizeof(detail::kNetMagic));
    const std::uint64_t h = static_cast<std::uint64_t>(net.hidden());
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    detail::write_doubles(out, net.w1.data(), static_cast<std::size_t>(net.w1.size()));
    detail::write_doubles(out, net.b1.data(), static_cast<std::size_t>(net.b1.size()));
    detail::write_doubles(out, net.w2.data(), static_cast<std::size_t>(net.w2.size()));
    detail::write_doubles(out, &net.b2, 1);
    const double scales[6] = {scaling.value.lo, scaling.value.hi, scaling.x.lo,
                              scaling.x.hi,     scaling.t.lo,     scaling.t.hi};
    detail::write_doubles(out, scales, 6);
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

inline std::pair<SurrogateNet, AnnScaling> load_surrogate(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kNetMagic, sizeof(magic)) != 0)
        throw IoError("not a surrogate checkpoint: " + path);
    std::uint64_t h = 0;
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    const auto hid = static_cast<Eigen::Index>(h);
    SurrogateNet net{Eigen::MatrixXd(hid, 2), Eigen::VectorXd(hid), Eigen::RowVectorXd(hid), 0.0};
    detail::read_doubles(in, net.w1.data(), static_cast<std::size_t>(net.w1.size()));
    detail::read_doubles(in, net.b1.data(), static_cast<std::size_t>(net.b1.size()));
    detail::read_doubles(in, net.w2.data(), static_cast<std::size_t>(net.w2.size()));
    detail::read_doubles(in, &net.b2, 1);
    double s[6];
    detail::read_doubles(in, s, 6);
    if (!in) throw IoError("truncated checkpoint: " + path);
    return {std::move(net),
            AnnScaling{AffineScale{s[0], s[1]}, AffineScale{s[2], s[3]}, AffineScale{s[4], s[5]}}};
}

}  // namespace pdelearn
