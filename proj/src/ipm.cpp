#include "nmlab/ipm.hpp"

#include <cmath>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

void check(bool ok, const std::string& name, const std::string& detail) {
    if (!ok) throw ParameterError(name, detail);
}

std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

}  // namespace

IpmParams plan_ipm(const IpmRequest& q) {
    check(q.eps > 0 && q.eps < 1, "eps in (0,1)", "component error must lie in (0,1)");
    check(q.k > 0 && q.k <= static_cast<double>(q.n), "0<k<=n", "weak-seed entropy must lie in (0, n]");
    IpmParams p;
    p.n = q.n;
    p.k = q.k;
    p.L = q.L;
    p.m = q.m;
    p.t = q.t;
    p.eps = q.eps;
    p.c = q.c;
    p.c_prime = q.c_prime;
    const double lg_m = static_cast<double>(ceil_log2_ratio(static_cast<double>(q.m), q.eps));
    const double lg_n = static_cast<double>(ceil_log2_ratio(static_cast<double>(q.n), q.eps));
    const std::size_t r = nipm_depth(q.L, q.ell);

    p.k_floor = 2 * q.c * q.ell * lg_m * std::pow(q.t + 2.0, static_cast<double>(r + 2));
    check(q.k >= p.k_floor, "k>=2c*ell*log(m/eps)*(t+2)^(r+2)",
          "weak-seed entropy " + std::to_string(q.k) + " is below the floor " + std::to_string(p.k_floor));
    p.d = static_cast<std::size_t>(std::floor(0.8 * q.k / 8.0)) * 8;
    p.d1 = static_cast<std::size_t>(std::ceil(q.c * lg_n));
    p.d_prime = static_cast<std::size_t>(std::ceil(q.c * lg_m));
    double mp = 0.9 * (static_cast<double>(q.m) - q.c * (q.t + 1.0) * lg_n);
    check(mp >= q.floor, "m'>=" + std::to_string(q.floor), "re-extracted row width " + std::to_string(mp) + " is below the floor");
    p.m_prime = static_cast<std::size_t>(std::floor(mp));
    check(p.d1 <= q.m, "d1<=m", "row slice " + std::to_string(p.d1) + " exceeds the row width");
    check(p.d_prime <= p.d, "d'<=d", "slice of z exceeds z");

    NipmRequest nr;
    nr.L = q.L;
    nr.ell = q.ell;
    nr.t = q.t;
    nr.m = p.m_prime;
    nr.eps = q.eps;
    nr.c = q.c;
    nr.c_prime = q.c_prime;
    nr.c_seed = q.c_seed;
    nr.floor = q.floor;
    p.inner = plan_nipm(nr);
    std::size_t need = 0;
    for (auto v : p.inner.d_sched) need += v;
    check(need <= p.d, "sum(d_i)<=0.8k", "merger seed prefixes need " + std::to_string(need) + " bits, z has " + std::to_string(p.d));
    p.inner.d = p.d;

    p.m_nominal = std::max(0.0, std::pow(0.9 / q.t, static_cast<double>(r + 1)) *
                                    (q.m - q.c * q.ell * (q.t + 1.0) * r * lg_m - q.c_prime * (q.t + 2.0) * lg_n));
    if (p.d > 64 || p.m_prime > 64) {
        p.not_instantiated = "z width " + std::to_string(p.d) + " or row width " + std::to_string(p.m_prime) +
                             " exceeds the 64-bit field block of the implemented extractor family";
    } else {
        p.ext1 = make_scheme(q.n, p.d1, p.d, q.k, q.eps);
        p.ext2 = make_scheme(q.m, p.d_prime, p.m_prime, q.m / 2.0, q.eps);
        if (!p.inner.instantiated()) p.not_instantiated = p.inner.not_instantiated;
    }
    return p;
}

IpmParams desk_ipm(std::size_t n, double k, std::size_t m, std::size_t d1, std::size_t d, std::size_t d_prime,
                   std::size_t m_prime, const NipmParams& inner, double eps) {
    IpmParams p;
    p.n = n;
    p.k = k;
    p.L = inner.L;
    p.m = m;
    p.t = inner.t;
    p.eps = eps;
    p.d = d;
    p.d1 = d1;
    p.d_prime = d_prime;
    p.m_prime = m_prime;
    p.inner = inner;
    p.inner.d = d;
    p.ext1 = make_scheme(n, d1, d, k, eps);
    p.ext2 = make_scheme(m, d_prime, m_prime, m / 2.0, eps);
    validate(p);
    return p;
}

void validate(const IpmParams& p) {
    check(p.d1 <= p.m, "d1<=m", "row slice exceeds the row width");
    check(p.d_prime <= p.d, "d'<=d", "slice of z exceeds z");
    check(p.ext1.n_in == p.n && p.ext1.d_seed == p.d1 && p.ext1.m_out == p.d, "ext1 shape", "ext1 must map (n, d1) to d bits");
    check(p.ext2.n_in == p.m && p.ext2.d_seed == p.d_prime && p.ext2.m_out == p.m_prime, "ext2 shape",
          "ext2 must map (m, d') to m' bits");
    check(p.inner.m == p.m_prime && p.inner.d == p.d, "inner shape", "inner merger must read rows of width m' and a d-bit seed");
    validate(p.inner);
}

BitString ipm_weak(const RowMatrix& x, const BitString& y, const IpmParams& p) {
    if (!p.instantiated()) throw ParameterError("instantiated", p.not_instantiated);
    if (x.width() != p.m || x.rows() > p.L) throw ShapeError("ipm_weak: matrix shape disagrees with the parameters");
    if (y.size() != p.n) throw ShapeError("ipm_weak: weak seed has " + std::to_string(y.size()) + " bits, expected " + std::to_string(p.n));
    BitString w = slice(x.row(0), p.d1);
    BitString z = ext(p.ext1, y, w);
    BitString v = slice(z, p.d_prime);
    std::vector<BitString> vbar;
    vbar.reserve(x.rows());
    for (const auto& row : x.data()) vbar.push_back(ext(p.ext2, row, v));
    return recursive_nipm(RowMatrix(std::move(vbar)), z, p.inner);
}

std::uint64_t ipm_weak_u64(const std::uint64_t* rows, std::size_t count, std::uint64_t y, const IpmParams& p) {
    if (!p.instantiated()) throw ParameterError("instantiated", p.not_instantiated);
    if (p.m > 64 || p.n > 64) throw ShapeError("ipm_weak_u64 needs rows and seed of at most 64 bits");
    if (count == 0 || count > p.L) throw ShapeError("ipm_weak_u64: row count disagrees with the parameters");
    std::uint64_t w = (rows[0] >> (p.m - p.d1)) & low_mask(p.d1);
    std::uint64_t z = ext_u64(p.ext1, y, w);
    std::uint64_t v = (z >> (p.d - p.d_prime)) & low_mask(p.d_prime);
    std::uint64_t buf[64];
    std::vector<std::uint64_t> big;
    std::uint64_t* vb = buf;
    if (count > 64) {
        big.resize(count);
        vb = big.data();
    }
    for (std::size_t i = 0; i < count; ++i) vb[i] = ext_u64(p.ext2, rows[i], v);
    return recursive_nipm_u64(vb, count, z, p.inner);
}

void to_json(nlohmann::json& j, const IpmParams& p) {
    j = nlohmann::json{{"n", p.n},           {"k", p.k},           {"L", p.L},
                       {"m", p.m},           {"t", p.t},           {"eps", p.eps},
                       {"d", p.d},           {"d1", p.d1},         {"d_prime", p.d_prime},
                       {"m_prime", p.m_prime}, {"c", p.c},         {"c_prime", p.c_prime},
                       {"k_floor", p.k_floor}, {"m_nominal", p.m_nominal}, {"inner", p.inner},
                       {"instantiated", p.instantiated()}};
    if (p.instantiated()) {
        j["ext1"] = p.ext1;
        j["ext2"] = p.ext2;
    } else {
        j["not_instantiated"] = p.not_instantiated.empty() ? p.inner.not_instantiated : p.not_instantiated;
    }
}

}  // namespace nmlab
