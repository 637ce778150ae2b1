#include "volcano/modpoly.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fstream>
#include <set>
#include <sstream>

namespace volcano {

void ModularPolynomial::set(u32 i, u32 j, mpz_class v) {
    if (i < j) std::swap(i, j);
    if (i > ell_ + 1) throw std::invalid_argument("modpoly coefficient exponent out of range");
    if (v == 0)
        c_.erase({i, j});
    else
        c_[{i, j}] = std::move(v);
}

const mpz_class& ModularPolynomial::get(u32 i, u32 j) const {
    static const mpz_class zero = 0;
    if (i < j) std::swap(i, j);
    auto it = c_.find({i, j});
    return it == c_.end() ? zero : it->second;
}

Poly instantiate(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& j) {
    if (phi.ell() == ctx.p()) throw std::invalid_argument("instantiate: ell equals the characteristic");
    u32 n = static_cast<u32>(phi.ell()) + 1;
    // powers of j
    std::vector<FieldElement> jp(n + 1, FieldElement(ctx, 1));
    for (u32 i = 1; i <= n; ++i) jp[i] = jp[i - 1] * j;
    std::vector<FieldElement> out(n + 1, FieldElement(ctx, 0));
    for (const auto& [key, coeff] : phi.coefficients()) {
        auto [i, k] = key;
        u64 cm = mpz_fdiv_ui(coeff.get_mpz_t(), ctx.p());
        FieldElement ce(ctx, cm);
        out[k] += ce * jp[i];
        if (i != k) out[i] += ce * jp[k];
    }
    return Poly(ctx, std::move(out));
}

std::vector<FieldElement> neighbors(const ModularPolynomial& phi, const FieldCtx& ctx,
                                    const FieldElement& j, Rng& rng) {
    Poly f = instantiate(phi, ctx, j);
    std::vector<FieldElement> out;
    for (auto& [r, m] : poly_roots(f, true, rng)) {
        for (int k = 0; k < m; ++k) out.push_back(r);
    }
    return out;  // poly_roots output is sorted
}

void store_modpoly(const std::string& path, const ModularPolynomial& phi) {
    std::ostringstream os;
    os << "modpoly ell=" << phi.ell() << "\n";
    for (const auto& [key, coeff] : phi.coefficients()) {
        os << key.first << " " << key.second << " " << coeff.get_str() << "\n";
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("store_modpoly: cannot open " + path);
    f << os.str();
    if (!f.good()) throw std::runtime_error("store_modpoly: write failed for " + path);
}

ModularPolynomial load_modpoly(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_modpoly: cannot open " + path);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    u64 ell = 0;
    bool have_header = false;
    ModularPolynomial phi;
    std::set<std::pair<u32, u32>> seen;
    std::pair<u32, u32> last{0, 0};
    bool first_entry = true;
    while (std::getline(f, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream is(line);
        if (!have_header) {
            std::string word;
            if (!(is >> word)) continue;  // blank before header
            if (word != "modpoly") fail("expected 'modpoly ell=<l>' header");
            std::string kv;
            if (!(is >> kv) || kv.rfind("ell=", 0) != 0) fail("expected ell=<l>");
            try {
                ell = std::stoull(kv.substr(4));
            } catch (...) {
                fail("bad ell value");
            }
            if (!is_prime_u64(ell)) fail("ell is not prime");
            phi = ModularPolynomial(ell);
            have_header = true;
            continue;
        }
        long long i, j;
        std::string coeff;
        if (!(is >> i)) continue;  // blank line
        if (!(is >> j >> coeff)) fail("expected '<i> <j> <coefficient>'");
        std::string extra;
        if (is >> extra) fail("trailing tokens");
        if (i < 0 || j < 0 || i > static_cast<long long>(ell) + 1 || j > static_cast<long long>(ell) + 1)
            fail("exponent out of range");
        if (j > i) fail("entries must have i >= j");
        std::pair<u32, u32> key{static_cast<u32>(i), static_cast<u32>(j)};
        if (seen.count(key)) fail("duplicate (i, j) entry");
        if (!first_entry && key <= last) fail("entries must be sorted lexicographically");
        seen.insert(key);
        last = key;
        first_entry = false;
        mpz_class v;
        if (mpz_set_str(v.get_mpz_t(), coeff.c_str(), 10) != 0) fail("bad integer coefficient");
        phi.set(key.first, key.second, v);
    }
    if (!have_header) fail("missing header");
    return phi;
}

PhiCache::PhiCache(std::string dir, ComputeFn compute) : dir_(std::move(dir)), compute_(std::move(compute)) {
    ::mkdir(dir_.c_str(), 0755);  // ok if it already exists
}

ModularPolynomial PhiCache::get(u64 ell) const {
    std::string path = dir_ + "/phi_" + std::to_string(ell) + ".txt";
    struct ::stat st;
    if (::stat(path.c_str(), &st) == 0) return load_modpoly(path);
    // Advisory lock so concurrent writers compute once.
    std::string lock_path = path + ".lock";
    int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd < 0) throw std::runtime_error("PhiCache: cannot open lock file " + lock_path);
    ::flock(fd, LOCK_EX);
    ModularPolynomial phi;
    try {
        if (::stat(path.c_str(), &st) == 0) {
            phi = load_modpoly(path);  // another writer finished first
        } else {
            phi = compute_(ell);
            std::string tmp = path + ".tmp." + std::to_string(::getpid());
            store_modpoly(tmp, phi);
            if (::rename(tmp.c_str(), path.c_str()) != 0)
                throw std::runtime_error("PhiCache: rename failed for " + path);
        }
    } catch (...) {
        ::flock(fd, LOCK_UN);
        ::close(fd);
        throw;
    }
    ::flock(fd, LOCK_UN);
    ::close(fd);
    return phi;
}

}  // namespace volcano
