#include "roughmerton/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "roughmerton/errors.hpp"

namespace roughmerton {

namespace {

constexpr std::uint32_t kDumpVersion = 1;

template <typename T>
void put(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw IoError("path dump is truncated");
  }
  return value;
}

void put_array(std::ostream& os, const std::vector<double>& xs) {
  os.write(reinterpret_cast<const char*>(xs.data()),
           static_cast<std::streamsize>(xs.size() * sizeof(double)));
}

bool get_array(std::istream& is, std::vector<double>& xs, std::size_t n) {
  xs.resize(n);
  is.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (is.gcount() == 0 && n > 0) {
    xs.clear();
    return false;
  }
  if (static_cast<std::size_t>(is.gcount()) != n * sizeof(double)) {
    throw IoError("path dump is truncated");
  }
  return true;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

std::string content_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw NumericalError("SHA-1 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    const unsigned char b = digest[i];
    out += hex[b >> 4];
    out += hex[b & 0xf];
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

std::string resolvent_csv(const ResolventCurve& curve) {
  std::ostringstream os;
  os << "t,R\n";
  for (std::size_t j = 0; j < curve.values.size(); ++j) {
    os << format_double(curve.grid.node(j)) << ',' << format_double(curve.values[j]) << '\n';
  }
  return os.str();
}

std::string riccati_csv(const RiccatiSolution& s) {
  std::ostringstream os;
  os << "# kernel=" << s.kernel.describe() << " c0=" << format_double(s.coeffs.c0)
     << " c1=" << format_double(s.coeffs.c1) << " c2=" << format_double(s.coeffs.c2)
     << " dt=" << format_double(s.grid.dt()) << '\n';
  os << "t,phi\n";
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    os << format_double(s.grid.node(j)) << ',' << format_double(s.values[j]) << '\n';
  }
  return os.str();
}

std::string path_bundle_csv(const PathBundle& b) {
  const std::size_t nodes = b.grid.n_nodes();
  std::ostringstream os;
  os << "path_id,t,V,S,wealth\n";
  for (std::size_t p = 0; p < b.n_paths; ++p) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const std::size_t k = p * nodes + j;
      os << p << ',' << format_double(b.grid.node(j)) << ','
         << (b.v.empty() ? std::string() : format_double(b.v[k])) << ','
         << (b.s.empty() ? std::string() : format_double(b.s[k])) << ','
         << (b.wealth ? format_double((*b.wealth)[k]) : std::string()) << '\n';
    }
  }
  return os.str();
}

void write_path_bundle_binary(const PathBundle& b, std::ostream& os) {
  const std::size_t cells = b.n_paths * b.grid.n_nodes();
  if (b.v.size() != cells || b.s.size() != cells) {
    throw DomainError("binary dump needs V and S for every path");
  }
  os.write("VMPB", 4);
  put(os, kDumpVersion);
  put(os, static_cast<std::uint64_t>(b.n_paths));
  put(os, static_cast<std::uint64_t>(b.grid.n_steps()));
  put(os, b.grid.dt());
  put(os, b.seed);
  put_array(os, b.v);
  put_array(os, b.s);
  if (b.wealth) put_array(os, *b.wealth);
  if (!os) throw IoError("failed writing path dump");
}

PathBundle read_path_bundle_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "VMPB", 4) != 0) {
    throw IoError("not a path dump (bad magic)");
  }
  if (get<std::uint32_t>(is) != kDumpVersion) throw IoError("unsupported path dump version");
  const auto n_paths = get<std::uint64_t>(is);
  const auto n_steps = get<std::uint64_t>(is);
  const auto dt = get<double>(is);
  const auto seed = get<std::uint64_t>(is);
  PathBundle b{TimeGrid(dt, n_steps), n_paths, seed};
  const std::size_t cells = n_paths * (n_steps + 1);
  if (!get_array(is, b.v, cells) || !get_array(is, b.s, cells)) {
    throw IoError("path dump is truncated");
  }
  std::vector<double> wealth;
  if (get_array(is, wealth, cells)) b.wealth = std::move(wealth);
  return b;
}

std::string scaling_csv(const ScalingReport& r) {
  std::ostringstream os;
  os << "q,lag,m,fitted\n";
  for (std::size_t qi = 0; qi < r.qs.size(); ++qi) {
    for (std::size_t li = 0; li < r.lags.size(); ++li) {
      os << format_double(r.qs[qi]) << ',' << r.lags[li] << ',' << format_double(r.m(qi, li))
         << ',' << format_double(r.fitted(qi, li)) << '\n';
    }
  }
  return os.str();
}

nlohmann::json scaling_summary(const ScalingReport& r) {
  return {{"H_hat", r.H_hat}, {"r2", r.r2_h}, {"r2_per_q", r.r2}, {"zeta_q", r.zeta_q},
          {"qs", r.qs},       {"lags", r.lags}};
}

std::string strategy_csv(const DistortionSolution& s) {
  std::ostringstream os;
  os << "t,pi_star\n";
  for (std::size_t j = 0; j < s.strategy.pi.size(); ++j) {
    os << format_double(s.grid().node(j)) << ',' << format_double(s.strategy.pi[j]) << '\n';
  }
  return os.str();
}

std::string distortion_curves_csv(const DistortionSolution& s) {
  std::ostringstream os;
  os << "t,phi,xi0\n";
  for (std::size_t j = 0; j < s.xi0_curve.size(); ++j) {
    os << format_double(s.grid().node(j)) << ',' << format_double(s.phi_curve.values[j]) << ','
       << format_double(s.xi0_curve[j]) << '\n';
  }
  return os.str();
}

nlohmann::json condition_json(const ConditionReport& c) {
  return {{"cond1", c.cond1},         {"cond1_slack", c.cond1_slack},
          {"cond2", c.cond2},         {"cond2_slack", c.cond2_slack},
          {"cond3", c.cond3},         {"cond3_slack", c.cond3_slack},
          {"p", c.p},                 {"eta_check", c.eta_check},
          {"eta", c.eta},             {"eta_a", c.eta_a},
          {"eta_slack", c.eta_slack}, {"sup_abs_pi", c.sup_abs_a},
          {"all_pass", c.all_pass}};
}

nlohmann::json distortion_summary(const DistortionSolution& s) {
  return {{"delta", s.delta},
          {"lambda", s.lambda_tilde},
          {"m0", s.m0},
          {"j0", s.j0},
          {"conditions", condition_json(s.conditions)}};
}

std::string quantization_csv(const Quantization& q) {
  std::ostringstream os;
  os << "i,xi_lo,xi_hi,x_i,q_i\n";
  for (std::size_t i = 0; i < q.n(); ++i) {
    os << i + 1 << ',' << format_double(q.partition[i]) << ',' << format_double(q.partition[i + 1])
       << ',' << format_double(q.atoms[i]) << ',' << format_double(q.masses[i]) << '\n';
  }
  return os.str();
}

std::string convergence_csv(const ConvergenceTable& t) {
  std::ostringstream os;
  os << "n,estimate,std_err,diff\n";
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    os << r.value.n << ',' << format_double(r.value.estimate) << ','
       << format_double(r.value.std_err) << ',' << (k == 0 ? std::string() : format_double(r.diff))
       << '\n';
  }
  return os.str();
}

}  // namespace roughmerton
