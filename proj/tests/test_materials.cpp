#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "twocolor/io.hpp"
#include "twocolor/materials.hpp"

using namespace twocolor;

namespace {

const MaterialRegistry& registry() {
  static MaterialRegistry reg = load_registry(resolve_data_dir({}));
  return reg;
}

// Central finite difference of the index; valid for smooth dispersion away
// from cancellation (single-model evaluations are benign).
double fd_dn_dlambda_um(const MaterialModel& m, double l_nm, double t_c) {
  const double h_nm = 0.05;
  return (m.index(l_nm + h_nm, t_c) - m.index(l_nm - h_nm, t_c)) /
         (2.0 * h_nm * 1e-3);
}

double fd_dn_dT(const MaterialModel& m, double l_nm, double t_c) {
  const double h = 0.05;
  return (m.index(l_nm, t_c + h) - m.index(l_nm, t_c - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("constant-index fixture material") {
  MaterialModel m("fixture", Axis::isotropic, "unit",
                  DispersionForm::constant_index, {{"n", 1.5}}, {}, 400.0,
                  1700.0, 24.5);
  CHECK(m.index(600.0, 24.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(m.index(1500.0, 80.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(m.dn_dlambda_um(600.0, 24.5) == 0.0);
  CHECK(m.dn_dT(600.0, 24.5) == 0.0);
  CHECK(m.group_index(600.0, 24.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_FALSE(m.temperature_dependent());
}

TEST_CASE("abcd form: yvo4 index anchors and analytic derivatives") {
  const auto& o = registry().get("yvo4", Axis::ordinary, "foctek");
  const auto& e = registry().get("yvo4", Axis::extraordinary, "foctek");
  CHECK(o.index(894.3, 24.5) == doctest::Approx(1.965288845).epsilon(1e-9));
  CHECK(e.index(894.3, 24.5) == doctest::Approx(2.176303133).epsilon(1e-9));

  for (double l : {600.0, 894.3, 1064.0, 1313.1, 1500.0}) {
    CHECK(o.dn_dlambda_um(l, 24.5) ==
          doctest::Approx(fd_dn_dlambda_um(o, l, 24.5)).epsilon(1e-6));
    CHECK(e.dn_dlambda_um(l, 24.5) ==
          doctest::Approx(fd_dn_dlambda_um(e, l, 24.5)).epsilon(1e-6));
    CHECK(o.dn_dT(l, 40.0) ==
          doctest::Approx(fd_dn_dT(o, l, 40.0)).epsilon(1e-6));
  }
  // Group index consistency n_g = n - l * dn/dl (l in um).
  const double l = 894.3;
  CHECK(o.group_index(l, 24.5) ==
        doctest::Approx(o.index(l, 24.5) -
                        l * 1e-3 * o.dn_dlambda_um(l, 24.5))
            .epsilon(1e-12));
}

TEST_CASE("rational3 form: bk7 is temperature independent") {
  const auto& g = registry().get("bk7", Axis::isotropic, "schott");
  CHECK(g.index(894.3, 24.5) == doctest::Approx(1.509089098).epsilon(1e-9));
  CHECK(g.index(1313.1, 24.5) == doctest::Approx(1.503545540).epsilon(1e-9));
  CHECK_FALSE(g.temperature_dependent());
  CHECK(g.dn_dT(894.3, 24.5) == 0.0);
  CHECK(g.index(894.3, 24.5) == g.index(894.3, 120.0));
  CHECK(g.dn_dlambda_um(894.3, 24.5) ==
        doctest::Approx(fd_dn_dlambda_um(g, 894.3, 24.5)).epsilon(1e-6));
  // Normal dispersion in the near infrared.
  CHECK(g.dn_dlambda_um(894.3, 24.5) < 0.0);
  CHECK(g.group_index(894.3, 24.5) > g.index(894.3, 24.5));
}

TEST_CASE("fseries form: poled crystal thermal dispersion") {
  const auto& o = registry().get("mgoln", Axis::ordinary, "calibrated_fform");
  const auto& e =
      registry().get("mgoln", Axis::extraordinary, "calibrated_fform");
  CHECK(o.index(894.3, 24.5) == doctest::Approx(2.242225816).epsilon(1e-9));
  CHECK(o.index(1313.1, 24.5) == doctest::Approx(2.217438943).epsilon(1e-9));
  CHECK(e.index(532.0, 24.5) == doctest::Approx(2.224438987).epsilon(1e-9));
  CHECK(e.index(1064.0, 24.5) == doctest::Approx(2.148154242).epsilon(1e-9));
  CHECK(e.index(1064.0, 100.0) == doctest::Approx(2.152971024).epsilon(1e-9));
  CHECK(o.temperature_dependent());
  CHECK(e.temperature_dependent());

  for (double t : {24.5, 60.0, 135.66}) {
    for (double l : {532.0, 894.3, 1064.0, 1313.1}) {
      CHECK(o.dn_dT(l, t) == doctest::Approx(fd_dn_dT(o, l, t)).epsilon(1e-6));
      CHECK(e.dn_dT(l, t) == doctest::Approx(fd_dn_dT(e, l, t)).epsilon(1e-6));
      CHECK(o.dn_dlambda_um(l, t) ==
            doctest::Approx(fd_dn_dlambda_um(o, l, t)).epsilon(1e-6));
      CHECK(e.dn_dlambda_um(l, t) ==
            doctest::Approx(fd_dn_dlambda_um(e, l, t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("registry lookups and birefringence") {
  const auto& reg = registry();
  CHECK(reg.has("yvo4", Axis::ordinary, "zelmon"));
  CHECK_FALSE(reg.has("yvo4", Axis::ordinary, "nosuchlab"));
  CHECK_THROWS_AS(reg.get("yvo4", Axis::ordinary, "nosuchlab"), LookupError);
  try {
    reg.get("yvo4", Axis::ordinary, "nosuchlab");
  } catch (const LookupError& e) {
    // The error enumerates what is actually loaded.
    CHECK(std::string(e.what()).find("zelmon") != std::string::npos);
  }

  CHECK(reg.birefringence("yvo4", "zelmon", 894.3, 24.5) ==
        doctest::Approx(0.211408).epsilon(1e-5));
  CHECK(reg.birefringence("yvo4", "zelmon", 1313.1, 24.5) ==
        doctest::Approx(0.205449).epsilon(1e-5));
  // Positive uniaxial: n_e > n_o.
  CHECK(reg.birefringence("yvo4", "sato", 894.3, 24.5) > 0.0);
  CHECK_THROWS_AS(reg.birefringence("bk7", "schott", 894.3, 24.5),
                  LookupError);

  const auto labels = reg.source_labels("yvo4");
  CHECK(labels.size() == 4);
}

TEST_CASE("every data-file anchor passes") {
  const auto checks = registry().check_anchors();
  CHECK(checks.size() >= 17);
  for (const auto& c : checks) {
    INFO(c.file, " ", c.anchor.kind, " @ ", c.anchor.wavelength_nm, " nm");
    CHECK(c.pass);
    CHECK(std::abs(c.computed - c.anchor.value) <= c.anchor.tolerance);
  }
}

TEST_CASE("wavelength validity is enforced with a named model") {
  const auto& o = registry().get("yvo4", Axis::ordinary, "zelmon");
  CHECK_THROWS_AS(o.index(400.0, 24.5), DomainError);
  CHECK_THROWS_AS(o.index(1700.0, 24.5), DomainError);
  try {
    o.index(400.0, 24.5);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("yvo4") != std::string::npos);
  }
}

TEST_CASE("json round trip reproduces the model exactly") {
  for (const auto* m : registry().models()) {
    const nlohmann::json j = m->to_json();
    const MaterialModel copy = MaterialModel::from_json(
        j, m->material(), m->axis(), m->source_label(),
        m->validity_nm().first, m->validity_nm().second,
        m->reference_temperature_c());
    const auto [lo, hi] = m->validity_nm();
    for (int k = 0; k < 100; ++k) {
      const double l = lo + (hi - lo) * (k + 0.5) / 100.0;
      const double t = 20.0 + 140.0 * ((k * 37) % 100) / 100.0;
      CHECK(copy.index(l, t) == m->index(l, t));
    }
  }
}

TEST_CASE("axis and form names round-trip") {
  for (Axis a : {Axis::ordinary, Axis::extraordinary, Axis::isotropic})
    CHECK(axis_from_name(axis_name(a)) == a);
  for (DispersionForm f :
       {DispersionForm::constant_index, DispersionForm::sellmeier_abcd,
        DispersionForm::sellmeier_rational3, DispersionForm::sellmeier_fseries})
    CHECK(form_from_name(form_name(f)) == f);
  CHECK_THROWS_AS(axis_from_name("diagonal"), ConfigError);
  CHECK_THROWS_AS(form_from_name("cauchy"), ConfigError);
}
