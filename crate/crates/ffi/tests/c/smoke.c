#include <stdio.h>
#include <string.h>
#include "hydra.h"

int main(void) {
    HydraMapHandle *map = NULL;
    if (hydra_map_from_source("H3", &map) != HYDRA_STATUS_OK) return 1;

    uint64_t v = 0;
    if (hydra_map_apply(map, 3, &v) != HYDRA_STATUS_OK || v != 5) return 2;

    char *json = NULL;
    if (hydra_qh_apply_basis(map, "1/5", &json) != HYDRA_STATUS_OK) return 3;
    if (!strstr(json, "\"3/10\"")) return 4;
    hydra_string_free(json);

    bool eq = false;
    if (hydra_qh_check_profinite(map, "2/7", 13, &eq) != HYDRA_STATUS_OK || !eq) return 5;

    HydraMapHandle *bad = NULL;
    if (hydra_map_from_source("nope", &bad) != HYDRA_STATUS_PARSE) return 6;
    if (strlen(hydra_last_error()) == 0) return 7;

    hydra_map_free(map);
    printf("ok %s\n", hydra_version());
    return 0;
}
