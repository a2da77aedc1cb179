#include <stdio.h>
#include <string.h>
#include "mvgallery.h"

int main(void) {
    MvgModel *m = NULL;
    if (mvg_model_new("A2", "1,1", &m) != MVG_STATUS_OK) {
        fprintf(stderr, "%s\n", mvg_last_error());
        return 1;
    }
    size_t n = 0;
    uint64_t dim = 0;
    if (mvg_crystal_size(m, &n) != MVG_STATUS_OK || mvg_weyl_dimension(m, &dim) != MVG_STATUS_OK) {
        return 1;
    }
    char *json = NULL;
    if (mvg_polytopes_json(m, "0,0", &json) != MVG_STATUS_OK) {
        return 1;
    }
    int has = strstr(json, "\"polytopes\"") != NULL;
    mvg_string_free(json);
    mvg_model_free(m);

    MvgModel *bad = NULL;
    MvgStatus s = mvg_model_new("A2", "-1,1", &bad);
    printf("%zu %llu %d %d %s\n", n, (unsigned long long)dim, has, (int)s, bad == NULL ? "null" : "set");
    return 0;
}
