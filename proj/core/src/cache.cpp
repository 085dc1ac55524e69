#include "boundpair/cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

#ifndef BOUNDPAIR_VERSION
#define BOUNDPAIR_VERSION "dev"
#endif

namespace boundpair {

namespace {

using nlohmann::json;

StateKind kind_from(const std::string& s) {
  if (s == "bound") return StateKind::bound;
  if (s == "edge") return StateKind::edge_localized;
  return StateKind::scattering;
}

}  // namespace

std::string content_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string bound_search_key(const ArrayParams& params) {
  std::ostringstream os;
  os.precision(17);
  os << "boundpair-bound|N=" << params.n_atoms() << "|period_ratio=" << params.period_ratio()
     << "|gamma0=" << params.gamma0() << "|solver=hseqr-hsein-mirror|window=ceil(6/kappa)|weight=0.5|spread=N/4"
     << "|version=" << BOUNDPAIR_VERSION;
  return os.str();
}

StateCache::StateCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path StateCache::path_for(const ArrayParams& params) const {
  return dir_ / (content_hash(bound_search_key(params)) + ".json");
}

std::optional<BoundSearchResult> StateCache::load(const ArrayParams& params) const {
  std::ifstream in(path_for(params));
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
    if (j.at("key").get<std::string>() != bound_search_key(params)) return std::nullopt;
    BoundSearchResult r;
    r.rank = j.at("rank").get<std::size_t>();
    r.candidates = j.at("candidates").get<std::size_t>();
    const auto& c = j.at("classification");
    r.cls.kind = kind_from(c.at("kind").get<std::string>());
    r.cls.near_weight = c.at("near_weight").get<double>();
    r.cls.com_spread = c.at("com_spread").get<double>();
    r.cls.window = c.at("window").get<int>();
    if (j.at("found").get<bool>()) {
      TwoPhotonState st;
      st.energy = {j.at("re_eps").get<double>(), j.at("im_eps").get<double>()};
      st.residual = j.at("residual").get<double>();
      const auto re = j.at("psi_re").get<std::vector<double>>();
      const auto im = j.at("psi_im").get<std::vector<double>>();
      const PairBasis basis(params.n_atoms());
      if (re.size() != basis.dim() || im.size() != basis.dim()) return std::nullopt;
      st.psi = CMatrix::Zero(params.n_atoms(), params.n_atoms());
      for (std::size_t i = 0; i < basis.dim(); ++i) {
        const cdouble v{re[i], im[i]};
        st.psi(basis.first0(i), basis.second0(i)) = v;
        st.psi(basis.second0(i), basis.first0(i)) = v;
      }
      r.state = std::move(st);
    }
    return r;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void StateCache::store(const ArrayParams& params, const BoundSearchResult& result) const {
  std::filesystem::create_directories(dir_);
  json j;
  j["key"] = bound_search_key(params);
  j["n_atoms"] = params.n_atoms();
  j["period_ratio"] = params.period_ratio();
  j["gamma0"] = params.gamma0();
  j["found"] = result.state.has_value();
  j["rank"] = result.rank;
  j["candidates"] = result.candidates;
  j["classification"] = {{"kind", to_string(result.cls.kind)},
                         {"near_weight", result.cls.near_weight},
                         {"com_spread", result.cls.com_spread},
                         {"window", result.cls.window}};
  if (result.state) {
    const auto& st = *result.state;
    j["re_eps"] = st.energy.re;
    j["im_eps"] = st.energy.im;
    j["residual"] = st.residual;
    const PairBasis basis(params.n_atoms());
    std::vector<double> re(basis.dim()), im(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i) {
      const cdouble v = st.psi(basis.first0(i), basis.second0(i));
      re[i] = v.real();
      im[i] = v.imag();
    }
    j["psi_re"] = std::move(re);
    j["psi_im"] = std::move(im);
  }
  const auto target = path_for(params);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("cache: failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

BoundSearchResult cached_most_subradiant_bound(const ArrayParams& params, const StateCache* cache) {
  if (cache)
    if (auto hit = cache->load(params)) return *hit;
  BoundSearchResult r = most_subradiant_bound(params);
  if (cache) cache->store(params, r);
  return r;
}

}  // namespace boundpair
