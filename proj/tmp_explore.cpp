// Scratch exploration binary (not part of the build).
#include <cstdio>

#include "nvrr/scenario.hpp"

using namespace nvrr;

int main() {
  CalibrationScenario sc;
  sc.b0 = MagneticField{0.244};
  const double contrast = calibrate_contrast_protocol(0.03, sc);
  sc.readout.contrast = contrast;
  const double kappa = calibrate_kappa(1700.0, sc);
  std::printf("contrast = %.17g\nkappa    = %.17g\n", contrast, kappa);

  const auto fit =
      calibrate_field_model(1700.0, MagneticField{0.244}, 0.09, MagneticField{0.082}, sc);
  std::printf("joint kappa = %.17g\njoint a_es  = %.17g\n", fit.kappa, fit.a_es_ghz);
  return 0;
}
