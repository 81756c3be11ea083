#include <stdio.h>
#include <string.h>

#include "gcg.h"

static int expect(int cond, const char *what) {
  if (!cond) {
    const char *err = gcg_last_error();
    fprintf(stderr, "failed: %s (%s)\n", what, err ? err : "no error");
  }
  return cond ? 0 : 1;
}

int main(void) {
  int bad = 0;

  GcgTable *t = NULL;
  bad += expect(gcg_t_dims(1, 1, true, 5, &t) == GCG_STATUS_OK, "t_dims");
  bad += expect(gcg_table_rows(t) == 5 && gcg_table_cols(t) == 4, "t_dims shape");
  bad += expect(strcmp(gcg_table_column_name(t, 3), "dim_quotient") == 0, "column name");
  uint64_t expected[5] = {2, 1, 0, 0, 0};
  for (size_t w = 0; w < 5; w++) {
    uint64_t v = 99;
    bad += expect(gcg_table_get(t, w, 3, &v) == GCG_STATUS_OK && v == expected[w], "t_(1)(1) dims");
  }
  uint64_t v;
  bad += expect(gcg_table_get(t, 5, 0, &v) == GCG_STATUS_OUT_OF_RANGE, "out of range");
  bad += expect(gcg_last_error() != NULL, "error message set");
  gcg_table_free(t);

  GcgConfig cfg = gcg_config_default();
  GcgReport *r = NULL;
  bad += expect(gcg_verify("mc", &cfg, &r) == GCG_STATUS_OK, "verify");
  bad += expect(gcg_report_passed(r) && gcg_report_len(r) > 0, "report passed");
  bad += expect(strcmp(gcg_report_check_anchor(r, 0), "gc.z.degree") == 0, "first anchor");
  char *json = gcg_report_to_json(r);
  bad += expect(json != NULL && strstr(json, "\"passed\": true") != NULL, "json");
  gcg_string_free(json);
  gcg_report_free(r);

  bad += expect(gcg_verify("nonsense", &cfg, &r) == GCG_STATUS_INVALID_ARGUMENT, "bad suite");

  uint64_t residual = 1;
  bad += expect(gcg_mo_mc_residual(2, 1, true, 3, &residual) == GCG_STATUS_OK && residual == 0, "mo mc");

  if (bad == 0) printf("ok\n");
  return bad == 0 ? 0 : 1;
}
