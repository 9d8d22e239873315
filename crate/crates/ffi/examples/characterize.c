#include <stdio.h>
#include "dcqd.h"
int main(void) {
  DcqdChannel *ch = NULL; DcqdChi *chi = NULL;
  if (dcqd_channel_parse("bit_flip:0.25", 1, &ch) != DCQD_STATUS_OK) return 1;
  if (dcqd_characterize(ch, NULL, &chi) != DCQD_STATUS_OK) return 2;
  double re[16], im[16];
  dcqd_chi_copy(chi, re, im, 16);
  printf("chi00=%.6f chi11=%.6f\n", re[0], re[5]);
  DcqdAmplitudes a = {0.8, 0, 0.6, 0};
  DcqdChi *bad = NULL;
  DcqdStatus s = dcqd_characterize(ch, &a, &bad);
  printf("status=%d msg=%s\n", (int)s, dcqd_last_error());
  dcqd_chi_free(chi); dcqd_channel_free(ch);
  return 0;
}
