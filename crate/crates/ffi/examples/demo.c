/* cc -I crates/ffi/include crates/ffi/examples/demo.c target/release/libbecom.a -lm -lpthread -ldl */
#include <stdio.h>
#include "becom.h"

int main(void) {
  BecomParams *p = becom_params_new();
  becom_params_set(p, BECOM_PARAM_DELTA_C, 28900.0);
  becom_params_set(p, BECOM_PARAM_OMEGA_SW, 1.0);

  BecomSteadyState s;
  if (becom_steady_state(p, &s) != BECOM_STATUS_OK) {
    fprintf(stderr, "steady state: %s\n", becom_last_error_message());
    becom_params_free(p);
    return 1;
  }
  printf("alpha^2 = %.6g  beta_1 = %.6g  G = %.6g\n", s.alpha * s.alpha, s.beta_1, s.coupling_g);

  BecomFluctuations f;
  if (becom_fluctuations(p, &f) == BECOM_STATUS_OK)
    printf("dn_ph = %.6g  dn_b = %.6g  E_N = %.6g\n", f.delta_n_ph, f.delta_n_b, f.log_negativity);

  double res;
  if (becom_resonance_detuning(p, &res) == BECOM_STATUS_OK)
    printf("resonance at delta_c = %.6f\n", res);

  becom_params_set(p, BECOM_PARAM_KAPPA, -1.0);
  if (becom_steady_state(p, &s) != BECOM_STATUS_OK)
    printf("expected failure: %s\n", becom_last_error_message());

  becom_params_free(p);
  return 0;
}
