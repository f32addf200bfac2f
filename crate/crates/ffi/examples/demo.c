/* Evaluates the main determinant and a few coefficients through the C ABI. */
#include <stdio.h>
#include <stdint.h>
#include "ellsym2.h"

int main(void) {
    Ellsym2Context *ctx = NULL;
    if (ellsym2_context_new(20, &ctx) != ELLSYM2_STATUS_OK) {
        fprintf(stderr, "%s\n", ellsym2_last_error_message());
        return 1;
    }
    double det = 0.0, lg = 0.0, beta = 0.0;
    ellsym2_reg3_det(ctx, &det);
    ellsym2_l_g(ctx, 3, &lg);
    ellsym2_l_chi4(ctx, 2, &beta);
    printf("det %.15f\n", det);
    printf("rhs %.15f\n", -21.5 * lg * beta);

    int64_t a[13];
    ellsym2_coefficients(ELLSYM2_FORM_G, 13, a, 13);
    printf("g");
    for (int k = 0; k < 13; k++) printf(" %lld", (long long)a[k]);
    printf("\n");

    char *s = NULL;
    ellsym2_eval_string(ctx, ELLSYM2_FN_L31, 0, 1, 0, 1, &s);
    printf("l31(O) %s\n", s);
    ellsym2_string_free(s);

    if (ellsym2_eval(ctx, ELLSYM2_FN_L31, 1, 0, 0, 1, &det) != ELLSYM2_STATUS_INVALID_ARGUMENT) return 1;
    printf("error \"%s\"\n", ellsym2_last_error_message());
    ellsym2_context_free(ctx);
    return 0;
}
