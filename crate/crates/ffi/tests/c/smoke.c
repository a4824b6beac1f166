#include <stdio.h>
#include <stdlib.h>
#include "sparse_sar.h"

#define CHECK(call)                                                            \
    do {                                                                       \
        int32_t rc = (call);                                                   \
        if (rc != SSAR_OK) {                                                   \
            fprintf(stderr, "%s -> %d: %s\n", #call, rc, ssar_last_error_message()); \
            return 1;                                                          \
        }                                                                      \
    } while (0)

int main(void) {
    SsarRadar *radar = NULL;
    SsarScene *scene = NULL;
    SsarEcho *echo = NULL;
    SsarResult *result = NULL;
    size_t rows = 0, cols = 0, acquired = 0;
    double mse = -1.0;

    CHECK(ssar_radar_preset("desk-small", &radar));
    CHECK(ssar_radar_scene_shape(radar, &rows, &cols));
    CHECK(ssar_scene_random(radar, 4, 1.0, 2.0, 7, &scene));
    CHECK(ssar_simulate_jittered(radar, scene, 1.0, 0.0, 1.0, 30.0, 8, &echo));
    CHECK(ssar_echo_acquired(echo, &acquired));
    CHECK(ssar_reconstruct(radar, echo, 1.0, 0.01, 500, false, &result));
    CHECK(ssar_result_mse(result, scene, &mse));
    if (ssar_radar_preset(NULL, &radar) != SSAR_ERR_NULL) {
        return 2;
    }
    printf("%zu %zu %zu %.3e %s\n", rows, cols, acquired, mse, ssar_version());

    ssar_result_free(result);
    ssar_echo_free(echo);
    ssar_scene_free(scene);
    ssar_radar_free(radar);
    return mse < 1e-2 ? 0 : 3;
}
