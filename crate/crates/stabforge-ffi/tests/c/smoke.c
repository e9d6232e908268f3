#include <stdio.h>
#include <string.h>

#include "stabforge.h"

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                      \
    }                                                                \
  } while (0)

int main(void) {
  SfPadic *a = NULL, *inv = NULL, *prod = NULL, *one = NULL;
  CHECK(sf_padic_from_integer(3, 2, 4, &a) == SF_STATUS_OK);
  CHECK(sf_padic_invert(a, &inv) == SF_STATUS_OK);
  uint32_t digits[8];
  size_t len = 0;
  CHECK(sf_padic_digits(inv, digits, 8, &len) == SF_STATUS_OK);
  CHECK(len == 4 && digits[0] == 1 && digits[1] == 1 && digits[2] == 0 && digits[3] == 1);
  CHECK(sf_padic_mul(a, inv, &prod) == SF_STATUS_OK);
  CHECK(sf_padic_from_integer(1, 2, 4, &one) == SF_STATUS_OK);
  bool eq = false;
  CHECK(sf_padic_equal(prod, one, &eq) == SF_STATUS_OK && eq);

  SfPadic *even = NULL, *bad = NULL;
  CHECK(sf_padic_from_integer(2, 2, 4, &even) == SF_STATUS_OK);
  CHECK(sf_padic_invert(even, &bad) == SF_STATUS_NON_UNIT && bad == NULL);
  char *err = sf_last_error();
  CHECK(err != NULL && strlen(err) > 0);
  sf_string_free(err);

  SfReport *report = NULL;
  CHECK(sf_classify_gn(3, 2, 1, &report) == SF_STATUS_OK);
  size_t count = 0;
  CHECK(sf_report_class_count(report, &count) == SF_STATUS_OK && count == 2);
  char *label = NULL;
  uint64_t order = 0;
  CHECK(sf_report_class(report, 0, &label, &order) == SF_STATUS_OK);
  CHECK(strcmp(label, "SD_16") == 0 && order == 16);
  sf_string_free(label);
  CHECK(sf_report_class(report, 5, NULL, NULL) == SF_STATUS_OUT_OF_RANGE);

  SfTower *tower = NULL;
  SfFieldElem *eps = NULL;
  CHECK(sf_tower_new(3, 1, 2, 16, &tower) == SF_STATUS_OK);
  CHECK(sf_epsilon(tower, 10, &eps) == SF_STATUS_OK);
  char *json = NULL;
  CHECK(sf_elem_digits_json(eps, 4, &json) == SF_STATUS_OK && strstr(json, "\"precision\": 4") != NULL);
  sf_string_free(json);

  CHECK(sf_hasse_embeds(2, 6) && !sf_hasse_embeds(2, 4));
  CHECK(sf_classify_gn(4, 2, 1, NULL) != SF_STATUS_OK);

  printf("stabforge %s ok\n", sf_version());
  sf_elem_free(eps);
  sf_tower_free(tower);
  sf_report_free(report);
  sf_padic_free(even);
  sf_padic_free(one);
  sf_padic_free(prod);
  sf_padic_free(inv);
  sf_padic_free(a);
  return 0;
}
