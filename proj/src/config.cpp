#include "ridgeless/config.hpp"

#include <algorithm>
#include <charconv>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ridgeless/errors.hpp"
#include "ridgeless/format.hpp"

namespace ridgeless {
namespace {

namespace pt = boost::property_tree;

const std::vector<std::pair<Preset, std::string>> kPresetNames = {
    {Preset::Fig1Left, "fig1_left"},
    {Preset::Fig1Right, "fig1_right"},
    {Preset::Fig2Left, "fig2_left"},
    {Preset::Fig2Right, "fig2_right"},
    {Preset::Fig3DoubleDescent, "fig3_double_descent"},
    {Preset::Fig45EigenDecay, "fig45_eigen_decay"},
    {Preset::Custom, "custom"},
};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

double to_real(const std::string& field, std::string_view text) {
  const auto v = parse_double(trim(text));
  if (!v) fail(field, "expected a real number, got '" + std::string(text) + "'");
  return *v;
}

std::size_t to_count(const std::string& field, std::string_view text) {
  const auto v = parse_integer(trim(text));
  if (!v || *v < 0) fail(field, "expected a non-negative integer, got '" + std::string(text) + "'");
  return static_cast<std::size_t>(*v);
}

bool to_bool(const std::string& field, std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(field, "expected a boolean, got '" + std::string(text) + "'");
}

template <typename T, typename Conv>
std::vector<T> to_list(const std::string& field, std::string_view text, Conv conv) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  for (std::string_view item : split_view(text, ',')) out.push_back(conv(field, item));
  return out;
}

std::string join_counts(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

SpectrumKind parse_kind(const std::string& field, const std::string& text) {
  if (text == "poly" || text == "polynomial_decay") return SpectrumKind::PolynomialDecay;
  if (text == "strong_weak") return SpectrumKind::StrongWeak;
  if (text == "explicit") return SpectrumKind::Explicit;
  fail(field, "unknown spectrum kind '" + text + "' (poly, strong_weak, explicit)");
}

std::string prior_name(PriorKind kind) {
  switch (kind) {
    case PriorKind::RandomEffects: return "random_effects";
    case PriorKind::Source: return "source";
    case PriorKind::GeneralSource: return "general_source";
  }
  return "?";
}

PriorKind parse_prior(const std::string& field, const std::string& text) {
  if (text == "random_effects") return PriorKind::RandomEffects;
  if (text == "source") return PriorKind::Source;
  if (text == "general_source") return PriorKind::GeneralSource;
  fail(field, "unknown prior kind '" + text + "' (random_effects, source, general_source)");
}

std::string phi_name(SourceFunction phi) {
  switch (phi) {
    case SourceFunction::Easy: return "easy";
    case SourceFunction::Isotropic: return "isotropic";
    case SourceFunction::Hard: return "hard";
  }
  return "?";
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"schema_version",
       [](ExperimentConfig&, const std::string& f, const std::string& v) {
         if (to_count(f, v) != static_cast<std::size_t>(kSchemaVersion)) {
           fail(f, "unsupported version " + v + " (expected " + std::to_string(kSchemaVersion) + ")");
         }
       }},
      {"preset", [](ExperimentConfig&, const std::string&, const std::string&) {}},
      {"model.n", [](auto& c, auto& f, auto& v) { c.n = to_count(f, v); }},
      {"model.tau", [](auto& c, auto& f, auto& v) { c.tau = to_real(f, v); }},
      {"spectrum.kind", [](auto& c, auto& f, auto& v) { c.spectrum.kind = parse_kind(f, v); }},
      {"spectrum.dim", [](auto& c, auto& f, auto& v) { c.spectrum.dim = to_count(f, v); }},
      {"spectrum.infinite",
       [](auto& c, auto& f, auto& v) { c.spectrum.infinite = to_bool(f, v); }},
      {"spectrum.trunc_dim",
       [](auto& c, auto& f, auto& v) { c.spectrum.trunc_dim = to_count(f, v); }},
      {"spectrum.eps", [](auto& c, auto& f, auto& v) { c.spectrum.eps = to_real(f, v); }},
      {"spectrum.F", [](auto& c, auto& f, auto& v) { c.spectrum.num_strong = to_count(f, v); }},
      {"spectrum.rho1", [](auto& c, auto& f, auto& v) { c.spectrum.rho1 = to_real(f, v); }},
      {"spectrum.rho2", [](auto& c, auto& f, auto& v) { c.spectrum.rho2 = to_real(f, v); }},
      {"spectrum.path", [](auto& c, auto&, auto& v) { c.spectrum.path = v; }},
      {"spectrum.values",
       [](auto& c, auto& f, auto& v) { c.spectrum.values = to_list<double>(f, v, to_real); }},
      {"prior.kind", [](auto& c, auto& f, auto& v) { c.prior.kind = parse_prior(f, v); }},
      {"prior.snr", [](auto& c, auto& f, auto& v) { c.prior.snr = to_real(f, v); }},
      {"prior.alpha", [](auto& c, auto& f, auto& v) { c.prior.alpha = to_real(f, v); }},
      {"prior.R2", [](auto& c, auto& f, auto& v) { c.prior.R2 = to_real(f, v); }},
      {"prior.phi",
       [](auto& c, auto& f, auto& v) {
         try {
           c.prior.phi = parse_source_function(v);
         } catch (const Error& e) {
           fail(f, e.what());
         }
       }},
      {"prior.theta_ignores_tau",
       [](auto& c, auto& f, auto& v) { c.prior.theta_ignores_tau = to_bool(f, v); }},
      {"sweep.M",
       [](auto& c, auto& f, auto& v) {
         c.M_values = trim(v) == "divisors" ? std::vector<std::size_t>{}
                                            : to_list<std::size_t>(f, v, to_count);
       }},
      {"sweep.m_policy",
       [](auto& c, auto& f, auto& v) {
         if (v == "strict") c.m_policy = MPolicy::Strict;
         else if (v == "round") c.m_policy = MPolicy::Round;
         else fail(f, "expected strict or round, got '" + v + "'");
       }},
      {"sweep.n", [](auto& c, auto& f, auto& v) { c.n_values = to_list<std::size_t>(f, v, to_count); }},
      {"sweep.d", [](auto& c, auto& f, auto& v) { c.d_values = to_list<std::size_t>(f, v, to_count); }},
      {"sweep.F", [](auto& c, auto& f, auto& v) { c.F_values = to_list<std::size_t>(f, v, to_count); }},
      {"sweep.rho2", [](auto& c, auto& f, auto& v) { c.rho2_values = to_list<double>(f, v, to_real); }},
      {"sweep.eps", [](auto& c, auto& f, auto& v) { c.eps_values = to_list<double>(f, v, to_real); }},
      {"run.reps", [](auto& c, auto& f, auto& v) { c.reps = to_count(f, v); }},
      {"run.seed",
       [](auto& c, auto& f, auto& v) {
         std::uint64_t seed = 0;
         const std::string_view t = trim(v);
         const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), seed);
         if (ec != std::errc() || ptr != t.data() + t.size()) fail(f, "expected an unsigned 64-bit integer");
         c.seed = seed;
       }},
      {"run.threads",
       [](auto& c, auto& f, auto& v) { c.threads = static_cast<unsigned>(to_count(f, v)); }},
      {"run.rank_tol", [](auto& c, auto& f, auto& v) { c.rank_tol = to_real(f, v); }},
      {"run.output", [](auto& c, auto&, auto& v) { c.output = v; }},
      {"theory.c1", [](auto& c, auto& f, auto& v) { c.constants.c1 = to_real(f, v); }},
      {"theory.c2", [](auto& c, auto& f, auto& v) { c.constants.c2 = to_real(f, v); }},
      {"theory.c3", [](auto& c, auto& f, auto& v) { c.constants.c3 = to_real(f, v); }},
      {"theory.c4", [](auto& c, auto& f, auto& v) { c.constants.c4 = to_real(f, v); }},
      {"theory.a", [](auto& c, auto& f, auto& v) { c.constants.a = to_real(f, v); }},
      {"theory.c_a", [](auto& c, auto& f, auto& v) { c.constants.c_a = to_real(f, v); }},
      {"theory.sigma_x", [](auto& c, auto& f, auto& v) { c.constants.sigma_x = to_real(f, v); }},
      {"theory.delta", [](auto& c, auto& f, auto& v) { c.constants.delta = to_real(f, v); }},
      {"theory.c", [](auto& c, auto& f, auto& v) { c.constants.c = to_real(f, v); }},
      {"theory.c_tilde", [](auto& c, auto& f, auto& v) { c.constants.c_tilde = to_real(f, v); }},
      {"theory.c_prime", [](auto& c, auto& f, auto& v) { c.constants.c_prime = to_real(f, v); }},
      {"realdata.path", [](auto& c, auto&, auto& v) { c.realdata.path = v; }},
      {"realdata.target_column",
       [](auto& c, auto& f, auto& v) { c.realdata.target_column = to_count(f, v); }},
      {"realdata.train_rows",
       [](auto& c, auto& f, auto& v) { c.realdata.train_rows = to_count(f, v); }},
      {"realdata.n_subsample",
       [](auto& c, auto& f, auto& v) { c.realdata.n_subsample = to_count(f, v); }},
  };
  return table;
}

void flatten(const pt::ptree& tree, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [key, child] : tree) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (child.empty()) {
      out.emplace_back(path, std::string(trim(child.data())));
    } else {
      flatten(child, path, out);
    }
  }
}

bool has_duplicates(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

}  // namespace

std::string to_string(Preset preset) {
  for (const auto& [p, name] : kPresetNames) {
    if (p == preset) return name;
  }
  return "custom";
}

Preset parse_preset(const std::string& name) {
  for (const auto& [p, text] : kPresetNames) {
    if (text == name) return p;
  }
  std::string known;
  for (const auto& [p, text] : kPresetNames) known += (known.empty() ? "" : ", ") + text;
  throw ConfigError("preset: unknown preset '" + name + "' (" + known + ")");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [p, name] : kPresetNames) out.push_back(name);
  return out;
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig c;
  c.preset = preset;
  c.tau = 1.0;
  c.seed = 20240101;
  c.reps = 100;
  c.output = to_string(preset);
  switch (preset) {
    case Preset::Fig1Left:
    case Preset::Fig1Right:
      c.n = 200;
      c.spectrum.kind = SpectrumKind::StrongWeak;
      c.spectrum.dim = 600;
      c.spectrum.num_strong = 100;
      c.spectrum.rho2 = 1e-4;
      c.prior.kind = PriorKind::RandomEffects;
      c.prior.snr = 0.1;
      if (preset == Preset::Fig1Left) {
        c.F_values = {100, 150, 200};
      } else {
        c.rho2_values = {1e-3, 1e-2, 5e-2, 1e-1};
      }
      break;
    case Preset::Fig2Left:
    case Preset::Fig2Right:
      c.spectrum.kind = SpectrumKind::Explicit;
      c.spectrum.dim = 90;
      c.spectrum.values.assign(90, 1.0);
      c.realdata.n_subsample = preset == Preset::Fig2Left ? 45 : 1350;
      c.n = c.realdata.n_subsample;
      if (preset == Preset::Fig2Left) c.M_values = {1, 3, 5, 9, 15};
      break;
    case Preset::Fig3DoubleDescent:
      c.n = 900;
      c.spectrum.kind = SpectrumKind::Explicit;
      c.spectrum.dim = 90;
      c.spectrum.values.assign(90, 1.0);
      c.prior.kind = PriorKind::RandomEffects;
      c.prior.snr = 1.0;
      break;
    case Preset::Fig45EigenDecay:
      c.n = 200;
      c.spectrum.kind = SpectrumKind::PolynomialDecay;
      c.spectrum.dim = 400;
      c.spectrum.eps = 1.0;
      c.prior.kind = PriorKind::RandomEffects;
      c.prior.snr = 1.0;
      c.eps_values = {0.1, 0.5, 1.0, 1.5};
      break;
    case Preset::Custom:
      c.n = 100;
      c.spectrum.kind = SpectrumKind::Explicit;
      c.spectrum.dim = 50;
      c.spectrum.values.assign(50, 1.0);
      c.reps = 10;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (reps < 1) fail("run.reps", "must be >= 1");
  if (threads < 1) fail("run.threads", "must be >= 1");
  if (!(tau >= 0.0) || !std::isfinite(tau)) fail("model.tau", "must be finite and >= 0");
  if (rank_tol && !(*rank_tol > 0.0)) fail("run.rank_tol", "must be positive");
  try {
    constants.validate();
  } catch (const Error& e) {
    fail("theory", e.what());
  }

  if (is_realdata()) {
    if (realdata.n_subsample < 1) fail("realdata.n_subsample", "must be >= 1");
    if (realdata.train_rows < 1) fail("realdata.train_rows", "must be >= 1");
    if (realdata.n_subsample > realdata.train_rows) {
      fail("realdata.n_subsample", "exceeds realdata.train_rows");
    }
  } else {
    if (n < 1) fail("model.n", "must be >= 1");
    switch (spectrum.kind) {
      case SpectrumKind::PolynomialDecay:
        if (!(spectrum.eps > 0.0)) fail("spectrum.eps", "must be positive");
        if (spectrum.infinite && spectrum.trunc_dim < 1) fail("spectrum.trunc_dim", "must be >= 1");
        for (double e : eps_values) {
          if (!(e > 0.0)) fail("sweep.eps", "values must be positive");
        }
        break;
      case SpectrumKind::StrongWeak:
        if (spectrum.num_strong < 1) fail("spectrum.F", "must be >= 1");
        if (!(spectrum.rho1 > spectrum.rho2 && spectrum.rho2 > 0.0)) {
          fail("spectrum.rho2", "requires rho1 > rho2 > 0");
        }
        for (double r : rho2_values) {
          if (!(spectrum.rho1 > r && r > 0.0)) fail("sweep.rho2", "values must lie in (0, rho1)");
        }
        break;
      case SpectrumKind::Explicit:
        if (spectrum.values.empty() && spectrum.path.empty()) {
          fail("spectrum.values", "explicit spectra need values or a path");
        }
        if (!d_values.empty()) fail("sweep.d", "cannot sweep d for an explicit spectrum");
        break;
    }
    if (spectrum.kind != SpectrumKind::Explicit && !spectrum.infinite && spectrum.dim < 1) {
      fail("spectrum.dim", "must be >= 1");
    }
    if (spectrum.infinite && spectrum.kind != SpectrumKind::PolynomialDecay) {
      fail("spectrum.infinite", "only polynomial decay spectra can be infinite");
    }
    if (!F_values.empty() && spectrum.kind != SpectrumKind::StrongWeak) {
      fail("sweep.F", "only applies to strong_weak spectra");
    }
    if (!rho2_values.empty() && spectrum.kind != SpectrumKind::StrongWeak) {
      fail("sweep.rho2", "only applies to strong_weak spectra");
    }
    if (!eps_values.empty() && spectrum.kind != SpectrumKind::PolynomialDecay) {
      fail("sweep.eps", "only applies to poly spectra");
    }
    switch (prior.kind) {
      case PriorKind::RandomEffects:
        if (!(prior.snr >= 0.0)) fail("prior.snr", "must be >= 0");
        break;
      case PriorKind::Source:
        if (!(prior.alpha >= 0.0)) fail("prior.alpha", "must be >= 0");
        [[fallthrough]];
      case PriorKind::GeneralSource:
        if (!(prior.R2 > 0.0)) fail("prior.R2", "must be positive");
        break;
    }
  }
  for (std::size_t m : M_values) {
    if (m < 1) fail("sweep.M", "values must be >= 1");
  }
  for (std::size_t v : n_values) {
    if (v < 1) fail("sweep.n", "values must be >= 1");
  }
  std::vector<double> as_real(M_values.begin(), M_values.end());
  if (has_duplicates(as_real)) fail("sweep.M", "duplicate values");
  // Surface divisibility problems (and the suggested replacement) up front.
  (void)series();
}

std::vector<SeriesSpec> ExperimentConfig::series() const {
  const std::vector<std::size_t> ns = n_values.empty() ? std::vector{is_realdata() ? realdata.n_subsample : n} : n_values;
  const std::size_t base_d = spectrum.kind == SpectrumKind::Explicit && !spectrum.values.empty()
                                 ? spectrum.values.size()
                                 : spectrum.dim;
  const std::vector<std::size_t> ds = d_values.empty() ? std::vector{base_d} : d_values;
  const std::vector<std::size_t> Fs =
      F_values.empty() ? std::vector{spectrum.num_strong} : F_values;
  const std::vector<double> rhos = rho2_values.empty() ? std::vector{spectrum.rho2} : rho2_values;
  const std::vector<double> epss = eps_values.empty() ? std::vector{spectrum.eps} : eps_values;

  std::vector<SeriesSpec> out;
  for (std::size_t nn : ns) {
    for (std::size_t dd : ds) {
      for (std::size_t F : Fs) {
        for (double rho2 : rhos) {
          for (double eps : epss) {
            SeriesSpec s;
            s.n = nn;
            s.d = dd;
            s.F = F;
            s.rho2 = rho2;
            s.eps = eps;
            if (spectrum.kind == SpectrumKind::StrongWeak && F > dd) {
              fail("sweep.F", "F=" + std::to_string(F) + " exceeds d=" + std::to_string(dd));
            }
            if (M_values.empty()) {
              s.grid = divisors(nn);
            } else {
              std::set<std::size_t> grid;
              for (std::size_t m : M_values) {
                if (m > nn) fail("sweep.M", "M=" + std::to_string(m) + " exceeds n=" + std::to_string(nn));
                if (nn % m == 0) {
                  grid.insert(m);
                  continue;
                }
                try {
                  (void)split(nn, m);
                } catch (const DivisibilityError& e) {
                  if (m_policy == MPolicy::Strict) fail("sweep.M", e.what());
                  grid.insert(theory::round_to_divisor(static_cast<double>(m), nn));
                  s.dropped.push_back(m);
                }
              }
              s.grid.assign(grid.begin(), grid.end());
            }
            out.push_back(std::move(s));
          }
        }
      }
    }
  }
  return out;
}

Spectrum ExperimentConfig::build_spectrum(const SeriesSpec& s) const {
  switch (spectrum.kind) {
    case SpectrumKind::PolynomialDecay:
      return spectrum.infinite ? Spectrum::polynomial_decay_infinite(s.eps, spectrum.trunc_dim)
                               : Spectrum::polynomial_decay(s.eps, s.d);
    case SpectrumKind::StrongWeak:
      return Spectrum::strong_weak(s.F, s.d, s.rho2, spectrum.rho1);
    case SpectrumKind::Explicit:
      if (!spectrum.values.empty()) return Spectrum::explicit_values(spectrum.values);
      return Spectrum::load_explicit(spectrum.path);
  }
  throw ConfigError("spectrum.kind: unsupported");
}

ModelConfig ExperimentConfig::model(const SeriesSpec& s) const {
  ModelConfig m{build_spectrum(s)};
  m.n = s.n;
  m.noise_tau = tau;
  m.seed = seed;
  switch (prior.kind) {
    case PriorKind::RandomEffects:
      m.prior = RandomEffectsPrior{prior.snr, prior.theta_ignores_tau};
      break;
    case PriorKind::Source:
      m.prior = SourcePrior{prior.alpha, prior.R2};
      break;
    case PriorKind::GeneralSource:
      m.prior = SourcePrior{source_exponent(prior.phi), prior.R2};
      break;
  }
  return m;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "schema_version=" << kSchemaVersion << '\n'
     << "preset=" << to_string(preset) << '\n'
     << "model.n=" << n << '\n'
     << "model.tau=" << format_double(tau) << '\n'
     << "spectrum.kind=" << to_string(spectrum.kind) << '\n'
     << "spectrum.dim=" << spectrum.dim << '\n'
     << "spectrum.infinite=" << spectrum.infinite << '\n'
     << "spectrum.trunc_dim=" << spectrum.trunc_dim << '\n'
     << "spectrum.eps=" << format_double(spectrum.eps) << '\n'
     << "spectrum.F=" << spectrum.num_strong << '\n'
     << "spectrum.rho1=" << format_double(spectrum.rho1) << '\n'
     << "spectrum.rho2=" << format_double(spectrum.rho2) << '\n'
     << "spectrum.path=" << spectrum.path.string() << '\n'
     << "spectrum.values=" << join_reals(spectrum.values) << '\n'
     << "prior.kind=" << prior_name(prior.kind) << '\n'
     << "prior.snr=" << format_double(prior.snr) << '\n'
     << "prior.alpha=" << format_double(prior.alpha) << '\n'
     << "prior.R2=" << format_double(prior.R2) << '\n'
     << "prior.phi=" << phi_name(prior.phi) << '\n'
     << "prior.theta_ignores_tau=" << prior.theta_ignores_tau << '\n'
     << "sweep.M=" << (M_values.empty() ? "divisors" : join_counts(M_values)) << '\n'
     << "sweep.m_policy=" << (m_policy == MPolicy::Strict ? "strict" : "round") << '\n'
     << "sweep.n=" << join_counts(n_values) << '\n'
     << "sweep.d=" << join_counts(d_values) << '\n'
     << "sweep.F=" << join_counts(F_values) << '\n'
     << "sweep.rho2=" << join_reals(rho2_values) << '\n'
     << "sweep.eps=" << join_reals(eps_values) << '\n'
     << "run.reps=" << reps << '\n'
     << "run.seed=" << seed << '\n'
     << "run.rank_tol=" << (rank_tol ? format_double(*rank_tol) : "default") << '\n'
     << "theory=" << constants.describe() << '\n'
     << "realdata.path=" << realdata.path.string() << '\n'
     << "realdata.target_column=" << realdata.target_column << '\n'
     << "realdata.train_rows=" << realdata.train_rows << '\n'
     << "realdata.n_subsample=" << realdata.n_subsample << '\n';
  return os.str();
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(canonical());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }

  std::vector<std::pair<std::string, std::string>> entries;
  flatten(tree, "", entries);

  ExperimentConfig config = preset_config(Preset::Custom);
  for (const auto& [key, value] : entries) {
    if (key == "preset") config = preset_config(parse_preset(value));
  }
  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key + ": unknown key");
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace ridgeless
