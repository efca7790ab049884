#include <math.h>
#include <stdio.h>
#include "fwl.h"

int main(void) {
    double xs[] = {-1.0, 0.0, 1.0}, zs[] = {1.0, 0.0, 1.0};
    FwlPolyhedral *u = NULL;
    FwlPerturbation *z = NULL;
    FwlVariation r;
    if (fwl_polyhedral_new(xs, zs, 3, &u) != FWL_STATUS_OK) return 1;
    if (fwl_perturbation_from_json("{\"kind\": \"constant\", \"value\": 1}", &z) != FWL_STATUS_OK) return 2;
    if (fwl_first_variation(u, z, NAN, &r) != FWL_STATUS_OK) return 3;
    printf("%.12f %.12f %d\n", r.lhs, r.rhs_total, r.pass);
    if (fwl_polyhedral_evaluate(NULL, 0.0, &r.lhs) != FWL_STATUS_NULL_POINTER) return 4;
    if (fwl_last_error_message() == NULL) return 5;
    fwl_perturbation_free(z);
    fwl_polyhedral_free(u);
    return r.pass ? 0 : 6;
}
