#include <math.h>
#include <stdio.h>
#include <string.h>

#include "infprod.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    const double entries[] = {0.5, 0.5, 1.0 / 3, 2.0 / 3, 0.5, 0.5, 0.5, 0.5};
    InfprodFamily *fam = NULL;
    CHECK(infprod_family_new(entries, 2, 1.0, 2.0, &fam) == INFPROD_STATUS_OK);
    int converges = 0;
    uint32_t cases = 0;
    CHECK(infprod_classify(fam, &converges, &cases) == INFPROD_STATUS_OK);
    CHECK(converges == 1 && cases == 0xF);
    infprod_family_free(fam);

    const int64_t num[] = {1, 1}, den[] = {2, 2};
    InfprodSystem *sys = NULL;
    CHECK(infprod_system_new(1, 1, num, den, 2, &sys) == INFPROD_STATUS_OK);
    const size_t word[] = {0, 1};
    double mass = 0;
    CHECK(infprod_cylinder_measure(sys, word, 2, &mass) == INFPROD_STATUS_OK);
    CHECK(fabs(mass - 0.25) < 1e-14);
    InfprodEstimate est;
    CHECK(infprod_interval_measure(sys, "0", "1", 0, 1e-12, &est) == INFPROD_STATUS_OK);
    CHECK(fabs(est.value - 2.0 / 3) < 1e-9);
    CHECK(infprod_monte_carlo(sys, 0, 1, 0, 0, 0, &est) == INFPROD_STATUS_PRECONDITION);
    CHECK(infprod_last_error() != NULL && strlen(infprod_last_error()) > 0);
    infprod_system_free(sys);
    puts("ok");
    return 0;
}
