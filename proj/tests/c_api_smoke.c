#include <stdio.h>
#include <string.h>

#include "vqrng/vqrng.h"

int main(void) {
  vqrng_config* cfg = NULL;
  if (vqrng_config_default(&cfg) != VQRNG_OK) return 1;
  char hash[65];
  if (vqrng_config_hash(cfg, hash) != VQRNG_OK || strlen(hash) != 64) return 2;
  if (vqrng_config_set(cfg, "laser.nope", "1") != VQRNG_PARSE) return 3;
  if (strlen(vqrng_last_error()) == 0) return 4;

  const uint8_t raw[] = {0, 1, 1, 0};
  vqrng_bits *in = NULL, *out = NULL;
  if (vqrng_bits_from_array(raw, 4, &in) != VQRNG_OK) return 5;
  if (vqrng_von_neumann(in, &out) != VQRNG_OK || vqrng_bits_size(out) != 2) return 6;
  uint8_t got[2];
  vqrng_bits_copy(out, got, 2);
  if (got[0] != 0 || got[1] != 1) return 7;

  double g = 0.0;
  if (vqrng_reduction_factor(0.0, 0.1, &g) != VQRNG_NO_EXTRACTABLE_ENTROPY) return 8;
  vqrng_bits_free(out);
  vqrng_bits_free(in);
  vqrng_config_free(cfg);
  puts("c api smoke ok");
  return 0;
}
