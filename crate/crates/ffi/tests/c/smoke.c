#include <stdio.h>
#include <string.h>
#include "zoneplace.h"

#define CHECK(expr)                                                          \
    do {                                                                     \
        if (!(expr)) {                                                       \
            const char *m = zp_last_error_message();                         \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #expr,   \
                    m ? m : "no message");                                   \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    ZpArchitecture *arch = NULL;
    ZpCircuit *circuit = NULL;
    ZpProgram *program = NULL;
    char *json = NULL;
    ZpMetrics metrics;

    CHECK(zp_architecture_builtin(&arch) == ZP_STATUS_OK);
    CHECK(zp_circuit_parse("OPENQASM 2.0;\nqreg q[3];\ncz q[0],q[1];\ncz q[1],q[2];\n",
                           ZP_FORMAT_QASM, &circuit) == ZP_STATUS_OK);
    CHECK(zp_circuit_num_qubits(circuit) == 3);

    ZpCompileOptions opts = zp_compile_options_default(ZP_PROFILE_QASMBENCH);
    CHECK(zp_compile(circuit, arch, &opts, &program) == ZP_STATUS_OK);
    CHECK(zp_program_metrics(program, &metrics) == ZP_STATUS_OK);
    CHECK(metrics.rearrangement_steps >= 2);
    CHECK(zp_program_to_json(program, &json) == ZP_STATUS_OK);
    CHECK(strstr(json, "\"instructions\"") != NULL);

    ZpCircuit *bad = NULL;
    CHECK(zp_circuit_parse("OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n",
                           ZP_FORMAT_QASM, &bad) == ZP_STATUS_UNSUPPORTED_GATE);
    CHECK(bad == NULL);
    CHECK(zp_last_error_message() != NULL);

    zp_string_free(json);
    zp_program_free(program);
    zp_circuit_free(circuit);
    zp_architecture_free(arch);
    printf("ok %zu steps\n", metrics.rearrangement_steps);
    return 0;
}
