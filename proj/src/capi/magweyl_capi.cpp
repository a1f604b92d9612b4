#include <magweyl/magweyl.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/commands.hpp"
#include "core/errors.hpp"

namespace {

using namespace magweyl;

thread_local std::string g_last_message;
thread_local std::string g_last_field;

template <typename T, std::uint32_t MAGIC>
struct handle {
  explicit handle(T* obj) : magic(MAGIC), obj(obj) {}
  ~handle() { magic = 0; }

  T* get() const {
    if (magic != MAGIC) throw InvalidArgument("bad handle (magic " + std::to_string(magic) + ")");
    return obj.get();
  }

  std::uint32_t magic = 0;
  std::unique_ptr<T> obj;
};

int set_error(int code, const std::string& message, const std::string& field) {
  g_last_message = message;
  g_last_field = field;
  return code;
}

// Runs `fn`, translating exceptions into status codes.
template <typename F>
int guard(F&& fn) {
  try {
    fn();
    g_last_message.clear();
    g_last_field.clear();
    return MW_OK;
  } catch (const Error& e) {
    return set_error(static_cast<int>(e.kind()), e.what(), e.field());
  } catch (const Json::exception& e) {
    return set_error(MW_ERROR_INVALID_ARGUMENT, std::string("malformed JSON: ") + e.what(), "");
  } catch (const std::bad_alloc&) {
    return set_error(MW_ERROR_BUDGET, "out of memory", "");
  } catch (const std::exception& e) {
    return set_error(MW_ERROR_INTERNAL, e.what(), "");
  } catch (...) {
    return set_error(MW_ERROR_INTERNAL, "unknown exception", "");
  }
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json parse_options(const char* text) {
  if (!text || !*text) return Json::object();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON options: ") + e.what(), "options");
  }
}

int run_command(Json (*cmd)(const Json&), const char* options_json, char** out_json) {
  if (!out_json) return set_error(MW_ERROR_NULL_POINTER, "argument out_json is null", "");
  *out_json = nullptr;
  return guard([&] { *out_json = copy_out(cmd(parse_options(options_json)).dump()); });
}

}  // namespace

struct mw_scenario_struct : handle<Scenario, 0x4D575343> {
  using handle::handle;
  std::string name;
};

struct mw_hamiltonian_struct : handle<DiscreteHamiltonian, 0x4D574841> {
  using handle::handle;
};

#define MW_CHECK_NULL(p) \
  do { if(!(p)) return set_error(MW_ERROR_NULL_POINTER, "argument " #p " is null", ""); } while(0)

extern "C" {

const char* mw_version(void) { return "0.1.0"; }

const char* mw_last_error_message(void) { return g_last_message.c_str(); }

const char* mw_last_error_field(void) { return g_last_field.c_str(); }

void mw_string_free(char* s) { std::free(s); }

int mw_scenario_create(mw_scenario_t* out, const char* name, const char* overrides_json, double mu, double h) {
  MW_CHECK_NULL(out);
  MW_CHECK_NULL(name);
  *out = nullptr;
  return guard([&] {
    ParameterMap overrides;
    if (overrides_json && *overrides_json)
      overrides = parameters_from_json(parse_options(overrides_json), "scenario.overrides");
    const std::optional<double> m = mu > 0.0 ? std::optional<double>(mu) : std::nullopt;
    const std::optional<double> hh = h > 0.0 ? std::optional<double>(h) : std::nullopt;
    auto s = std::make_unique<Scenario>(make_scenario(name, overrides, m, hh));
    auto* hdl = new mw_scenario_struct(s.release());
    hdl->name = name;
    *out = hdl;
  });
}

int mw_scenario_destroy(mw_scenario_t s) {
  if (!s) return MW_OK;
  return guard([&] {
    s->get();
    delete s;
  });
}

int mw_scenario_dimension(mw_scenario_t s, int* out) {
  MW_CHECK_NULL(s);
  MW_CHECK_NULL(out);
  return guard([&] { *out = s->get()->dimension; });
}

int mw_scenario_frequencies(mw_scenario_t s, const double* x, double* freqs, size_t* count) {
  MW_CHECK_NULL(s);
  MW_CHECK_NULL(x);
  MW_CHECK_NULL(freqs);
  MW_CHECK_NULL(count);
  return guard([&] {
    const Scenario& sc = *s->get();
    const Vec p = Vec::Map(x, sc.dimension);
    require(sc.domain.contains(p, 1e-12), "point lies outside the domain", "x");
    const FieldIntensity fi = intensity_matrix(sc, p);
    std::copy(fi.frequencies.begin(), fi.frequencies.end(), freqs);
    *count = fi.frequencies.size();
  });
}

int mw_characteristic_frequencies(const double* g, const double* F, size_t d, double* freqs, size_t* count) {
  MW_CHECK_NULL(g);
  MW_CHECK_NULL(F);
  MW_CHECK_NULL(freqs);
  MW_CHECK_NULL(count);
  return guard([&] {
    require(d >= 1 && d <= 64, "dimension must lie in [1, 64]", "d");
    const auto n = static_cast<Eigen::Index>(d);
    const Mat gm = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(g, n, n);
    const Mat Fm = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(F, n, n);
    const FrequencyResult r = characteristic_frequencies(gm, Fm);
    std::copy(r.frequencies.begin(), r.frequencies.end(), freqs);
    *count = r.frequencies.size();
  });
}

int mw_landau_levels(const double* f, size_t r, double cap, char** out_json) {
  MW_CHECK_NULL(out_json);
  *out_json = nullptr;
  if (r > 0) MW_CHECK_NULL(f);
  return guard([&] {
    const std::vector<double> freq(f, f + r);
    Json out = Json::array();
    for (const auto& lv : landau_levels(freq, cap)) out.push_back(Json{{"alpha", lv.alpha}, {"energy", lv.energy}});
    *out_json = copy_out(out.dump());
  });
}

int mw_hamiltonian_assemble(mw_hamiltonian_t* out, mw_scenario_t s, double mu, double h, int n, const char* bc) {
  MW_CHECK_NULL(out);
  MW_CHECK_NULL(s);
  *out = nullptr;
  return guard([&] {
    const Scenario& sc = *s->get();
    Lattice lat;
    lat.domain = sc.domain;
    lat.n.assign(static_cast<std::size_t>(sc.dimension), n);
    lat.boundary = (bc && *bc) ? std::vector<Boundary>(static_cast<std::size_t>(sc.dimension), parse_boundary(bc))
                               : default_boundaries(s->name, sc.dimension);
    lat.validate();
    auto H = std::make_unique<DiscreteHamiltonian>(assemble(sc, mu, h, lat));
    *out = new mw_hamiltonian_struct(H.release());
  });
}

int mw_hamiltonian_destroy(mw_hamiltonian_t H) {
  if (!H) return MW_OK;
  return guard([&] {
    H->get();
    delete H;
  });
}

int mw_hamiltonian_size(mw_hamiltonian_t H, size_t* out) {
  MW_CHECK_NULL(H);
  MW_CHECK_NULL(out);
  return guard([&] { *out = H->get()->size(); });
}

int mw_hamiltonian_count(mw_hamiltonian_t H, double tau, const char* method, int64_t* count) {
  MW_CHECK_NULL(H);
  MW_CHECK_NULL(count);
  return guard([&] {
    const CountMethod m = (method && *method) ? parse_count_method(method) : CountMethod::Auto;
    *count = count_below(*H->get(), tau, m).count;
  });
}

int mw_analyze(const char* options_json, char** out_json) { return run_command(run_analyze, options_json, out_json); }
int mw_weyl(const char* options_json, char** out_json) { return run_command(run_weyl, options_json, out_json); }
int mw_count(const char* options_json, char** out_json) { return run_command(run_count, options_json, out_json); }
int mw_reduce(const char* options_json, char** out_json) { return run_command(run_reduce, options_json, out_json); }
int mw_sweep(const char* options_json, char** out_json) { return run_command(run_sweep, options_json, out_json); }

}  // extern "C"
