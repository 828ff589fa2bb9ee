#include "aclab/io.hpp"

#include "aclab/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace aclab {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field(const std::filesystem::path& path, const ScalarField2D& field) {
    const Grid2D& g = field.grid();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "aclab-field 1 " << g.spec().n1 << ' ' << g.spec().n2 << ' ' << format_double(g.radius())
        << ' ' << format_double(g.spacing()) << ' ' << g.side() << '\n';
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.values().size() * sizeof(double)));
    if (!out) throw Error("short write to " + path.string());
}

ScalarField2D read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open field " + path.string());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic;
    int version = 0;
    LinkSpec spec;
    double R = 0.0, h = 0.0;
    std::size_t side = 0;
    hs >> magic >> version >> spec.n1 >> spec.n2 >> R >> h >> side;
    if (!hs || magic != "aclab-field" || version != 1)
        throw InvalidArgument("not a field dump: " + path.string());
    ScalarField2D field(Grid2D(spec, R, h));
    if (field.grid().side() != side) throw InvalidArgument("field header inconsistent: " + path.string());
    in.read(reinterpret_cast<char*>(field.values().data()),
            static_cast<std::streamsize>(field.values().size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(field.values().size() * sizeof(double)))
        throw InvalidArgument("truncated field dump: " + path.string());
    return field;
}

void write_curve_csv(const std::filesystem::path& path, const GeneratingCurve& curve) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "# n1=" << curve.spec().n1 << " n2=" << curve.spec().n2
        << " spacing=" << format_double(curve.spacing()) << " orientation=" << curve.orientation() << '\n';
    out << "s,x,y,theta\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        out << format_double(curve.s(i)) << ',' << format_double(curve.x(i)) << ','
            << format_double(curve.y(i)) << ',' << format_double(curve.theta(i)) << '\n';
}

GeneratingCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open curve " + path.string());
    std::string line;
    std::getline(in, line);
    LinkSpec spec;
    double spacing = 0.0;
    int orientation = 0;
    if (std::sscanf(line.c_str(), "# n1=%d n2=%d spacing=%lf orientation=%d", &spec.n1, &spec.n2, &spacing,
                    &orientation) != 4)
        throw InvalidArgument("bad curve header in " + path.string());
    std::getline(in, line);
    std::vector<double> x, y, theta;
    while (std::getline(in, line)) {
        double s, a, b, c;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &s, &a, &b, &c) != 4)
            throw InvalidArgument("bad curve row in " + path.string());
        x.push_back(a);
        y.push_back(b);
        theta.push_back(c);
    }
    return GeneratingCurve(spec, spacing, std::move(x), std::move(y), std::move(theta), orientation);
}

namespace {

std::string hex_digest(EVP_MD_CTX* ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += digits[md[i] >> 4];
        out += digits[md[i] & 15];
    }
    return out;
}

using DigestCtx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

DigestCtx sha256_context() {
    DigestCtx ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    return ctx;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    DigestCtx ctx = sha256_context();
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return hex_digest(ctx.get());
}

std::string sha256_text(const std::string& text) {
    DigestCtx ctx = sha256_context();
    EVP_DigestUpdate(ctx.get(), text.data(), text.size());
    return hex_digest(ctx.get());
}

}  // namespace aclab
