#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tco {

/// Cost-bearing parts of the streaming service. The first six are
/// "devices": they carry both a CAPEX and an OPEX curve with their own
/// time/subscriber growth rates.
enum class Component : int { Stb = 0, Mdm, Dslam, Bras, Msrvr, Esrvr, Cnt, Instr };

inline constexpr int kComponentCount = 8;
inline constexpr int kDeviceCount = 6;

inline constexpr std::array<std::string_view, kComponentCount> kComponentNames = {
    "stb", "mdm", "dslam", "bras", "msrvr", "esrvr", "cnt", "instr"};

inline constexpr std::string_view component_name(Component c) {
  return kComponentNames[static_cast<int>(c)];
}

inline constexpr bool is_device(Component c) { return static_cast<int>(c) < kDeviceCount; }

/// Parses "stb", "mdm", ... Throws std::invalid_argument on anything else.
inline Component parse_component(std::string_view name) {
  for (int i = 0; i < kComponentCount; ++i)
    if (kComponentNames[i] == name) return static_cast<Component>(i);
  throw std::invalid_argument("unknown component '" + std::string(name) + "'");
}

/// Perturbation terms in canonical order: a CAPEX and an OPEX term per
/// device, one CAPEX term for content, one OPEX term for infrastructure.
enum class Term : int {
  StbC = 0, StbO, MdmC, MdmO, DslamC, DslamO, BrasC, BrasO,
  MsrvrC, MsrvrO, EsrvrC, EsrvrO, CntC, InstrO
};

inline constexpr int kTermCount = 14;

inline constexpr std::array<std::string_view, kTermCount> kTermNames = {
    "stb_c",   "stb_o",   "mdm_c",   "mdm_o",   "dslam_c", "dslam_o", "bras_c",
    "bras_o",  "msrvr_c", "msrvr_o", "esrvr_c", "esrvr_o", "cnt_c",   "instr_o"};

inline constexpr int capex_term(Component c) {
  return c == Component::Cnt ? static_cast<int>(Term::CntC) : 2 * static_cast<int>(c);
}
inline constexpr int opex_term(Component c) {
  return c == Component::Instr ? static_cast<int>(Term::InstrO) : 2 * static_cast<int>(c) + 1;
}
/// Component that owns a perturbation term.
inline constexpr Component term_owner(int term) {
  if (term == static_cast<int>(Term::CntC)) return Component::Cnt;
  if (term == static_cast<int>(Term::InstrO)) return Component::Instr;
  return static_cast<Component>(term / 2);
}

template <typename Scalar>
using TermVector = Eigen::Matrix<Scalar, kTermCount, 1>;
template <typename Scalar>
using DeviceVector = Eigen::Matrix<Scalar, kDeviceCount, 1>;
template <typename Scalar>
using ComponentVector = Eigen::Matrix<Scalar, kComponentCount, 1>;

/// Initial component costs normalized by the ADSL modem cost.
template <typename Scalar>
struct DeviceCostTable {
  Scalar x_stb = Scalar(3.33);
  Scalar x_mdm = Scalar(1);
  Scalar x_dslam = Scalar(128);
  Scalar x_bras = Scalar(10);
  Scalar x_msrvr = Scalar(176);
  Scalar x_esrvr = Scalar(44.44);
  Scalar x_cnt = Scalar(11.11);
  Scalar x_instr = Scalar(100);

  static Scalar DeviceCostTable::*member(Component c) {
    switch (c) {
      case Component::Stb: return &DeviceCostTable::x_stb;
      case Component::Mdm: return &DeviceCostTable::x_mdm;
      case Component::Dslam: return &DeviceCostTable::x_dslam;
      case Component::Bras: return &DeviceCostTable::x_bras;
      case Component::Msrvr: return &DeviceCostTable::x_msrvr;
      case Component::Esrvr: return &DeviceCostTable::x_esrvr;
      case Component::Cnt: return &DeviceCostTable::x_cnt;
      case Component::Instr: return &DeviceCostTable::x_instr;
    }
    throw std::invalid_argument("unknown component");
  }

  Scalar operator[](Component c) const { return this->*member(c); }
  Scalar& operator[](Component c) { return this->*member(c); }

  void validate() const {
    for (int i = 0; i < kComponentCount; ++i) {
      const Scalar x = (*this)[static_cast<Component>(i)];
      if (!(x > Scalar(0)) || !std::isfinite(static_cast<double>(x)))
        throw std::invalid_argument("device cost x_" + std::string(kComponentNames[i]) +
                                    " must be positive and finite");
    }
  }
};

/// Curve coefficients of the CAPEX/OPEX model.
template <typename Scalar>
struct CostModelParams {
  Scalar y_stb{}, y_mdm{};
  Scalar z_stb = Scalar(3e-6), z_mdm = Scalar(3e-6);
  Scalar y_instr{};
  Scalar z_instr = Scalar(0.002231);
  Scalar u_instr = Scalar(0.00886);
  Scalar p_instr = Scalar(1), q_instr = Scalar(1), s_instr = Scalar(1);
  Scalar v_instr = Scalar(1.1), w_instr = Scalar(0.1);
  DeviceVector<Scalar> e0 = DeviceVector<Scalar>::Zero();  // per-year time growth
  DeviceVector<Scalar> e1 = DeviceVector<Scalar>::Zero();  // per-subscriber growth
  std::int64_t tau = 128;
  std::int64_t msrvr_count = 2;

  /// Coefficients tied to the device costs: y = 0.8x for STB/modem,
  /// e0 = e1 = 0.1x per device, y_instr = x_instr.
  static CostModelParams defaults(const DeviceCostTable<Scalar>& table) {
    CostModelParams p;
    p.y_stb = Scalar(0.8) * table.x_stb;
    p.y_mdm = Scalar(0.8) * table.x_mdm;
    p.y_instr = table.x_instr;
    for (int i = 0; i < kDeviceCount; ++i) {
      p.e0(i) = Scalar(0.1) * table[static_cast<Component>(i)];
      p.e1(i) = p.e0(i);
    }
    return p;
  }

  void validate(const DeviceCostTable<Scalar>& table) const {
    if (!(y_stb < table.x_stb)) throw std::invalid_argument("y_stb must be below x_stb");
    if (!(y_mdm < table.x_mdm)) throw std::invalid_argument("y_mdm must be below x_mdm");
    if (tau < 1) throw std::invalid_argument("tau must be at least 1");
    if (msrvr_count < 1) throw std::invalid_argument("msrvr_count must be at least 1");
    if (v_instr - w_instr < Scalar(0))
      throw std::invalid_argument("v_instr - w_instr must be nonnegative");
    const auto nonneg = [](Scalar v, const char* name) {
      if (!(v >= Scalar(0))) throw std::invalid_argument(std::string(name) + " must be nonnegative");
    };
    for (Scalar v : {y_stb, y_mdm, p_instr, q_instr, s_instr, v_instr, w_instr})
      if (!std::isfinite(static_cast<double>(v)))
        throw std::invalid_argument("cost coefficients must be finite");
    nonneg(z_stb, "z_stb");
    nonneg(z_mdm, "z_mdm");
    nonneg(y_instr, "y_instr");
    nonneg(z_instr, "z_instr");
    nonneg(u_instr, "u_instr");
    if (!(e0.array() >= Scalar(0)).all() || !e0.allFinite())
      throw std::invalid_argument("e0 must be finite and nonnegative");
    if (!(e1.array() >= Scalar(0)).all() || !e1.allFinite())
      throw std::invalid_argument("e1 must be finite and nonnegative");
  }
};

/// Subscribers n, edge servers m (continuous), years since deployment t.
template <typename Scalar>
struct ScenarioPoint {
  std::int64_t n = 1;
  Scalar m = Scalar(1);
  Scalar t = Scalar(0);

  void validate() const {
    if (n < 1) throw std::domain_error("scenario point needs n >= 1");
    if (!(t >= Scalar(0)) || !std::isfinite(static_cast<double>(t)))
      throw std::domain_error("scenario point needs finite t >= 0");
    if (!(m >= Scalar(1)) || !(m <= static_cast<Scalar>(n)))
      throw std::domain_error("scenario point needs 1 <= m <= n");
  }
};

/// Per-component contributions to the TCO after multiplicity scaling.
template <typename Scalar>
struct CostBreakdown {
  ComponentVector<Scalar> capex = ComponentVector<Scalar>::Zero();
  ComponentVector<Scalar> opex = ComponentVector<Scalar>::Zero();
  Scalar total{};

  Scalar recomputed_total() const { return capex.sum() + opex.sum(); }
};

namespace detail {

template <typename Scalar>
void require_nonnegative(Scalar v, const char* what) {
  if (!(v >= Scalar(0)) || !std::isfinite(static_cast<double>(v)))
    throw std::domain_error(std::string(what) + " must be finite and nonnegative");
}

template <typename Scalar>
Scalar time_inflation(Scalar e0, Scalar t) {
  using std::exp;
  return Scalar(2) - exp(-e0 * t);
}

}  // namespace detail

/// STB / modem CAPEX: cheaper with more subscribers, inflated over time.
template <typename Scalar>
Scalar capex_subscriber_device(Component c, Scalar n, Scalar t, const CostModelParams<Scalar>& params,
                               const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  using std::exp;
  detail::require_nonnegative(n, "n");
  detail::require_nonnegative(t, "t");
  Scalar y{}, z{};
  if (c == Component::Stb) {
    y = params.y_stb;
    z = params.z_stb;
  } else if (c == Component::Mdm) {
    y = params.y_mdm;
    z = params.z_mdm;
  } else {
    throw std::invalid_argument("subscriber-dependent CAPEX exists only for stb and mdm");
  }
  const Scalar x = table[c];
  const int d = static_cast<int>(c);
  return (x + (y - x) * exp(-z * n)) * detail::time_inflation(params.e0(d), t) + xi;
}

template <typename Scalar>
Scalar capex_stb(Scalar n, Scalar t, const CostModelParams<Scalar>& params,
                 const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  return capex_subscriber_device(Component::Stb, n, t, params, table, xi);
}

template <typename Scalar>
Scalar capex_mdm(Scalar n, Scalar t, const CostModelParams<Scalar>& params,
                 const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  return capex_subscriber_device(Component::Mdm, n, t, params, table, xi);
}

/// DSLAM, BRAS, media server and edge server CAPEX: x (2 - e^{-e0 t}) + xi.
template <typename Scalar>
Scalar capex_provider_device(Component c, Scalar t, const CostModelParams<Scalar>& params,
                             const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  detail::require_nonnegative(t, "t");
  if (c != Component::Dslam && c != Component::Bras && c != Component::Msrvr &&
      c != Component::Esrvr)
    throw std::invalid_argument("time-only CAPEX exists for dslam, bras, msrvr and esrvr");
  return table[c] * detail::time_inflation(params.e0(static_cast<int>(c)), t) + xi;
}

template <typename Scalar>
Scalar capex_dslam(Scalar t, const CostModelParams<Scalar>& p, const DeviceCostTable<Scalar>& x,
                   Scalar xi = Scalar(0)) {
  return capex_provider_device(Component::Dslam, t, p, x, xi);
}
template <typename Scalar>
Scalar capex_bras(Scalar t, const CostModelParams<Scalar>& p, const DeviceCostTable<Scalar>& x,
                  Scalar xi = Scalar(0)) {
  return capex_provider_device(Component::Bras, t, p, x, xi);
}
template <typename Scalar>
Scalar capex_msrvr(Scalar t, const CostModelParams<Scalar>& p, const DeviceCostTable<Scalar>& x,
                   Scalar xi = Scalar(0)) {
  return capex_provider_device(Component::Msrvr, t, p, x, xi);
}
template <typename Scalar>
Scalar capex_esrvr(Scalar t, const CostModelParams<Scalar>& p, const DeviceCostTable<Scalar>& x,
                   Scalar xi = Scalar(0)) {
  return capex_provider_device(Component::Esrvr, t, p, x, xi);
}

/// Content CAPEX is flat.
template <typename Scalar>
Scalar capex_cnt(const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  return table.x_cnt + xi;
}

/// Device OPEX: x (1 - e^{-e1 n}) (1 - e^{-e0 t}) + xi. Zero at n = 0 or t = 0.
template <typename Scalar>
Scalar opex_device(Component c, Scalar n, Scalar t, const CostModelParams<Scalar>& params,
                   const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  using std::expm1;
  if (!is_device(c))
    throw std::invalid_argument("no device OPEX for component " + std::string(component_name(c)));
  detail::require_nonnegative(n, "n");
  detail::require_nonnegative(t, "t");
  const int d = static_cast<int>(c);
  // (1 - e^{-x}) written as -expm1(-x) keeps the zero cases exact.
  return table[c] * (-expm1(-params.e1(d) * n)) * (-expm1(-params.e0(d) * t)) + xi;
}

/// Infrastructure OPEX; the only term that falls as edge servers are added.
template <typename Scalar>
Scalar opex_infrastructure(Scalar n, Scalar m, Scalar t, const CostModelParams<Scalar>& params,
                           const DeviceCostTable<Scalar>& table, Scalar xi = Scalar(0)) {
  using std::exp;
  detail::require_nonnegative(n, "n");
  detail::require_nonnegative(m, "m");
  detail::require_nonnegative(t, "t");
  const Scalar balance = table.x_instr + params.y_instr * exp(-params.z_instr * m);
  const Scalar demand = params.p_instr - params.q_instr * exp(-params.s_instr * n);
  const Scalar aging = params.v_instr - params.w_instr * exp(-params.u_instr * t);
  return balance * demand * aging + xi;
}

/// Number of DSLAM (and BRAS) units needed for n subscribers.
inline std::int64_t dslam_units(std::int64_t n, std::int64_t tau) { return (n + tau - 1) / tau; }

/// How many times each perturbation term enters the total: the total is
/// affine in the perturbation vector with these weights.
template <typename Scalar>
TermVector<Scalar> term_multipliers(const ScenarioPoint<Scalar>& point,
                                    const CostModelParams<Scalar>& params) {
  const Scalar n = static_cast<Scalar>(point.n);
  const Scalar units = static_cast<Scalar>(dslam_units(point.n, params.tau));
  const Scalar media = static_cast<Scalar>(params.msrvr_count);
  TermVector<Scalar> w;
  w << n, n, n, n, units, units, units, units, media, media, point.m, point.m, Scalar(1), Scalar(1);
  return w;
}

/// Aggregated TCO at one scenario point under the given perturbation draw.
template <typename Scalar>
CostBreakdown<Scalar> tco(const ScenarioPoint<Scalar>& point, const CostModelParams<Scalar>& params,
                          const DeviceCostTable<Scalar>& table, const TermVector<Scalar>& xi) {
  point.validate();
  const Scalar n = static_cast<Scalar>(point.n);
  const Scalar t = point.t;
  const TermVector<Scalar> w = term_multipliers(point, params);

  CostBreakdown<Scalar> out;
  for (int i = 0; i < kDeviceCount; ++i) {
    const auto c = static_cast<Component>(i);
    const int ct = capex_term(c);
    const int ot = opex_term(c);
    const Scalar capex = (c == Component::Stb || c == Component::Mdm)
                             ? capex_subscriber_device(c, n, t, params, table, xi(ct))
                             : capex_provider_device(c, t, params, table, xi(ct));
    out.capex(i) = w(ct) * capex;
    out.opex(i) = w(ot) * opex_device(c, n, t, params, table, xi(ot));
  }
  constexpr int cnt = static_cast<int>(Component::Cnt);
  constexpr int instr = static_cast<int>(Component::Instr);
  out.capex(cnt) = capex_cnt(table, xi(capex_term(Component::Cnt)));
  out.opex(instr) =
      opex_infrastructure(n, point.m, t, params, table, xi(opex_term(Component::Instr)));
  out.total = out.recomputed_total();
  return out;
}

/// The noise-free slice of tco.
template <typename Scalar>
CostBreakdown<Scalar> deterministic_tco(const ScenarioPoint<Scalar>& point,
                                        const CostModelParams<Scalar>& params,
                                        const DeviceCostTable<Scalar>& table) {
  return tco(point, params, table, TermVector<Scalar>::Zero().eval());
}

}  // namespace tco
