#include <stdio.h>
#include <string.h>

#include "moea.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);   \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    MoeaProblem *p = NULL;
    CHECK(moea_problem_new(MOEA_FAMILY_LOTZ, 4, 8, 0, &p) == MOEA_STATUS_OK);

    uint8_t bits[8] = {1, 1, 0, 0, 0, 0, 1, 0};
    uint32_t f[4];
    CHECK(moea_problem_evaluate(p, bits, 8, f, 4) == MOEA_STATUS_OK);
    CHECK(f[0] == 2 && f[1] == 2 && f[2] == 0 && f[3] == 1);
    CHECK(moea_problem_evaluate(p, bits, 7, f, 4) == MOEA_STATUS_LENGTH_MISMATCH);
    CHECK(moea_last_error() != NULL);

    uint64_t size = 0;
    CHECK(moea_problem_front_size(p, &size) == MOEA_STATUS_OK && size == 25);

    MoeaRunConfig cfg;
    CHECK(moea_run_config_default(&cfg) == MOEA_STATUS_OK);
    cfg.seed = 7;
    MoeaRunSummary s;
    CHECK(moea_run(p, &cfg, &s) == MOEA_STATUS_OK);
    CHECK(s.success && s.final_coverage == 1.0);
    moea_problem_free(p);

    MoeaProblem *bad = NULL;
    CHECK(moea_problem_new(MOEA_FAMILY_ONE_MIN_MAX, 3, 8, 0, &bad) == MOEA_STATUS_INVALID_ARGUMENT);
    CHECK(bad == NULL);
    CHECK(strlen(moea_last_error()) > 0);
    printf("ok %s\n", moea_version());
    return 0;
}
