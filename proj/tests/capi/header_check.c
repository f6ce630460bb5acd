#include "dca/dca.h"

/* Compiled as C: the header must stay valid C. */
int capi_c_roundtrip(void) {
  const double v[6] = {1.0, 2.0, 3.0, 4.0, 5.0, 7.0};
  dca_dataset* d = NULL;
  if (dca_dataset_from_values(v, 3, 2, &d) != DCA_OK) return -1;
  int ok = dca_dataset_rows(d) == 3 && dca_dataset_cols(d) == 2 && dca_dataset_name(d, 0) == NULL;
  dca_dataset_free(d);
  return ok;
}
