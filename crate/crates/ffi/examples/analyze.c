/* Build (from the workspace root, after `cargo build -p polydist-ffi`):
 *   cc crates/ffi/examples/analyze.c -Icrates/ffi/include \
 *      target/debug/libpolydist_ffi.a -lpthread -ldl -lm -o analyze
 */
#include <stdio.h>
#include "polydist.h"

int main(void) {
    /* I λ² + diag(-3,-1,3) λ + diag(2,0,2); coefficients A_0, A_1, A_2 */
    double re[27] = {
        2, 0, 0, 0, 0, 0, 0, 0, 2,
        -3, 0, 0, 0, -1, 0, 0, 0, 3,
        1, 0, 0, 0, 1, 0, 0, 0, 1,
    };
    char msg[256];
    PdPolynomial *p = NULL;
    if (pd_polynomial_new(3, 2, re, NULL, &p) != PD_STATUS_OK) {
        pd_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s\n", msg);
        return 1;
    }

    PdAnalysis *a = NULL;
    PdStatus st = pd_analyze(p, NULL, 0, 3.0, 0.0, PD_MODE_AUTO, &a);
    if (a == NULL) {
        pd_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s\n", msg);
        pd_polynomial_free(p);
        return 1;
    }
    printf("status %d, gamma* = %.6f, s* = %.6f, corrected = %d, verdict = %d\n", (int)st,
           pd_analysis_gamma_star(a), pd_analysis_s_star(a), pd_analysis_corrected(a),
           (int)pd_analysis_verdict(a));

    double q_re[27], q_im[27];
    if (pd_analysis_q_coefficients(a, q_re, q_im, 27) == PD_STATUS_OK)
        printf("Q leading coefficient (0,0) = %.4f, (1,1) = %.4f\n", q_re[18], q_re[22]);

    pd_analysis_free(a);
    pd_polynomial_free(p);
    return 0;
}
