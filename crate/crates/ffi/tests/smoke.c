#include <stdio.h>
#include "cran_pool.h"

int main(void) {
    const char *cfg = "n_rus = 2\nn_ues = 2\nsubset_size = 2\nmax_outer_iters = 5\n";
    CranPoolScenario *sc = NULL;
    CranPoolInstance *inst = NULL;
    CranPoolResult *res = NULL;
    CranPoolSummary s;

    if (cran_pool_scenario_from_config(cfg, &sc) != CRAN_POOL_STATUS_OK) return 1;
    if (cran_pool_instance_generate(sc, 9, &inst) != CRAN_POOL_STATUS_OK) return 2;
    if (cran_pool_optimize(inst, CRAN_POOL_SCHEME_EQUAL_THIRDS, &res) != CRAN_POOL_STATUS_OK) return 3;
    if (cran_pool_result_summary(res, &s) != CRAN_POOL_STATUS_OK) return 4;
    printf("sum_rate_bps=%.6e w_s_hz=%.6e\n", s.sum_rate_bps, s.w_s_hz);
    if (!(s.sum_rate_bps > 0.0)) return 5;
    if (cran_pool_scenario_from_config("bogus = 1", &sc) != CRAN_POOL_STATUS_INVALID_CONFIG) return 6;
    if (cran_pool_last_error() == NULL) return 7;

    cran_pool_result_free(res);
    cran_pool_instance_free(inst);
    cran_pool_scenario_free(sc);
    return 0;
}
