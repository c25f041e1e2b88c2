/* The public header must compile as C. */
#include "opu/opu.h"

#include <stdio.h>

int main(void) {
  opu_device_config cfg = {0};
  opu_device* dev = NULL;
  cfg.seed = 42;
  cfg.input_dim = 4;
  cfg.output_dim = 3;
  if (opu_device_create(&cfg, &dev) != OPU_OK) {
    fprintf(stderr, "%s\n", opu_last_error());
    return 1;
  }
  opu_device_destroy(dev);
  return 0;
}
