#include <math.h>
#include <stdio.h>

#include "qmele.h"

int main(void) {
    const double theta[5] = {0.0, 0.5, 0.1, 0.18, 0.4};
    double y[800];
    if (qmele_simulate(theta, 5, 1, 0, 1, 1, QMELE_INNOVATION_LAPLACE, 0.0, 1.0,
                       QMELE_STANDARDIZATION_ABS_MEAN_ONE, 800, 500, 3, y) != QMELE_STATUS_OK) {
        fprintf(stderr, "simulate: %s\n", qmele_last_error_message());
        return 1;
    }
    QmeleFit *fit = NULL;
    if (qmele_fit(y, 800, 1, 0, 1, 1, true, 0.5, 3, &fit) != QMELE_STATUS_OK) {
        fprintf(stderr, "fit: %s\n", qmele_last_error_message());
        return 1;
    }
    double est[5], se[5];
    uintptr_t m = qmele_fit_dim(fit);
    if (m != 5 || qmele_fit_estimates(fit, est, m) != QMELE_STATUS_OK ||
        qmele_fit_std_errors(fit, se, m) != QMELE_STATUS_OK) {
        return 1;
    }
    qmele_fit_free(fit);
    for (int i = 0; i < 5; i++) {
        if (!(fabs(est[i] - theta[i]) < 5.0 * se[i])) {
            fprintf(stderr, "parameter %d off: %g\n", i, est[i]);
            return 1;
        }
    }
    QmeleStatus bad = qmele_fit(y, 3, 1, 0, 1, 1, false, 0.0, 0, &fit);
    if (bad != QMELE_STATUS_INSUFFICIENT_DATA || fit != NULL) {
        return 1;
    }
    printf("ok %.4f\n", est[1]);
    return 0;
}
