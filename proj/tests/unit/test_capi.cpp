// Exercises the shared library through the public C header only.
#include <mqsp/mqsp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

namespace {

int failures = 0;

void check(bool ok, const char* what, int line) {
  if (!ok) {
    std::fprintf(stderr, "FAILED line %d: %s (last error: %s)\n", line, what, mqsp_last_error());
    ++failures;
  }
}

#define CHECK(cond) check((cond), #cond, __LINE__)

bool contains(const char* s, const char* needle) { return s != nullptr && std::strstr(s, needle) != nullptr; }

}  // namespace

int main() {
  CHECK(std::strlen(mqsp_version()) > 0);
  CHECK(std::strcmp(mqsp_status_name(MQSP_OK), "ok") == 0 || std::strlen(mqsp_status_name(MQSP_OK)) > 0);
  CHECK(std::strcmp(mqsp_status_name(MQSP_ERR_CRC_VIOLATION), mqsp_status_name(MQSP_ERR_CONFIG)) != 0);

  // Null arguments.
  mqsp_bilaurent* p = nullptr;
  CHECK(mqsp_bilaurent_from_json(nullptr, &p) == MQSP_ERR_NULL_ARGUMENT);
  CHECK(mqsp_bilaurent_from_json("{}", nullptr) == MQSP_ERR_NULL_ARGUMENT);
  CHECK(std::strlen(mqsp_last_error()) > 0);
  CHECK(mqsp_circuit_p(nullptr, &p) == MQSP_ERR_NULL_ARGUMENT);
  mqsp_bilaurent_free(nullptr);
  mqsp_circuit_free(nullptr);
  mqsp_hamiltonian_free(nullptr);
  mqsp_string_free(nullptr);

  // Malformed input.
  CHECK(mqsp_bilaurent_from_json("{\"window1\": [0, 1", &p) == MQSP_ERR_CONFIG);
  CHECK(mqsp_bilaurent_from_json("{\"window1\": [0, 0], \"window2\": [0, 0]}", &p) == MQSP_ERR_CONFIG);
  CHECK(p == nullptr);

  // Polynomial roundtrip.
  const char* poly = "{\"window1\": [0, 1], \"window2\": [-1, 0], \"coeffs\": [[1, 0], [0, 2], [0.5, 0], [0, 0]]}";
  CHECK(mqsp_bilaurent_from_json(poly, &p) == MQSP_OK);
  CHECK(std::strlen(mqsp_last_error()) == 0);
  int lo1 = 9, hi1 = 9, lo2 = 9, hi2 = 9;
  CHECK(mqsp_bilaurent_window(p, &lo1, &hi1, &lo2, &hi2) == MQSP_OK);
  CHECK(lo1 == 0 && hi1 == 1 && lo2 == -1 && hi2 == 0);
  double re = 0, im = 0;
  CHECK(mqsp_bilaurent_eval(p, 0.0, 0.0, &re, &im) == MQSP_OK);
  CHECK(std::abs(re - 1.5) < 1e-15 && std::abs(im - 2.0) < 1e-15);
  char* text = nullptr;
  CHECK(mqsp_bilaurent_to_json(p, &text) == MQSP_OK);
  mqsp_bilaurent* p2 = nullptr;
  CHECK(mqsp_bilaurent_from_json(text, &p2) == MQSP_OK);
  double re2 = 0, im2 = 0;
  mqsp_bilaurent_eval(p2, 0.3, -1.1, &re2, &im2);
  mqsp_bilaurent_eval(p, 0.3, -1.1, &re, &im);
  CHECK(re == re2 && im == im2);
  mqsp_string_free(text);
  mqsp_bilaurent_free(p2);
  mqsp_bilaurent_free(p);

  // Circuits.
  mqsp_circuit* c = nullptr;
  CHECK(mqsp_circuit_random("RRIRI", 7, &c) == MQSP_OK);
  mqsp_bilaurent* P = nullptr;
  mqsp_bilaurent* Q = nullptr;
  CHECK(mqsp_circuit_p(c, &P) == MQSP_OK);
  CHECK(mqsp_circuit_q(c, &Q) == MQSP_OK);
  mqsp_bilaurent_eval(P, 0.4, 1.7, &re, &im);
  mqsp_bilaurent_eval(Q, 0.4, 1.7, &re2, &im2);
  CHECK(std::abs(re * re + im * im + re2 * re2 + im2 * im2 - 1.0) < 1e-13);
  double rel = 1.0;
  CHECK(mqsp_circuit_roundtrip(P, c, &rel) == MQSP_OK);
  CHECK(rel < 1e-14);
  char* ctext = nullptr;
  CHECK(mqsp_circuit_to_json(c, &ctext) == MQSP_OK);
  CHECK(contains(ctext, "RRIRI"));
  mqsp_circuit* c2 = nullptr;
  CHECK(mqsp_circuit_from_json(ctext, &c2) == MQSP_OK);
  CHECK(mqsp_circuit_roundtrip(P, c2, &rel) == MQSP_OK && rel < 1e-14);
  mqsp_string_free(ctext);
  CHECK(mqsp_circuit_random("RXI", 1, &c2) != MQSP_OK);
  mqsp_circuit_free(c2);

  // Angle synthesis from a circuit target, then from P with Q as the complement.
  char* out_circuit = nullptr;
  char* report = nullptr;
  CHECK(mqsp_circuit_to_json(c, &ctext) == MQSP_OK);
  CHECK(mqsp_angles(ctext, nullptr, &out_circuit, &report, nullptr, nullptr, nullptr) == MQSP_OK);
  CHECK(contains(out_circuit, "angles"));
  CHECK(contains(report, "roundtrip_error"));
  mqsp_circuit* found = nullptr;
  CHECK(mqsp_circuit_from_json(out_circuit, &found) == MQSP_OK);
  CHECK(mqsp_circuit_roundtrip(P, found, &rel) == MQSP_OK && rel < 1e-8);
  mqsp_circuit_free(found);
  mqsp_string_free(out_circuit);
  mqsp_string_free(report);
  mqsp_string_free(ctext);
  char* ptext = nullptr;
  char* qtext = nullptr;
  mqsp_bilaurent_to_json(P, &ptext);
  mqsp_bilaurent_to_json(Q, &qtext);
  std::string with_q = std::string(ptext);
  with_q = with_q.substr(0, with_q.rfind('}')) + ", \"complements\": [" + qtext + "]}";
  CHECK(mqsp_angles(with_q.c_str(), "{\"schedule\": \"RRIRI\"}", &out_circuit, nullptr, nullptr, nullptr, nullptr) ==
        MQSP_OK);
  mqsp_string_free(out_circuit);
  mqsp_string_free(ptext);
  mqsp_string_free(qtext);
  mqsp_bilaurent_free(P);
  mqsp_bilaurent_free(Q);
  mqsp_circuit_free(c);

  // Hamiltonians and simulation.
  const char* ham = "{\"H_R\": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], \"H_I\": [[[0.5, 0], [0, 0]], [[0, 0], [0, 0]]]}";
  mqsp_hamiltonian* h = nullptr;
  CHECK(mqsp_hamiltonian_from_json(ham, &h) == MQSP_OK);
  int dim = 0;
  double a = 0, b = 0;
  CHECK(mqsp_hamiltonian_norms(h, &dim, &a, &b) == MQSP_OK);
  CHECK(dim == 2 && std::abs(a - 1.0) < 1e-14 && std::abs(b - 0.5) < 1e-14);
  char* sim = nullptr;
  CHECK(mqsp_simulate(h, "{\"method\": \"midpoint\", \"T\": 1.0, \"r\": 4}", &sim, nullptr) == MQSP_OK);
  CHECK(contains(sim, "error_norm"));
  mqsp_string_free(sim);
  CHECK(mqsp_simulate(h, "{\"method\": \"teleport\"}", &sim, nullptr) == MQSP_ERR_CONFIG);
  mqsp_hamiltonian_free(h);
  CHECK(mqsp_hamiltonian_from_json("{\"H_R\": [[[1, 0]]], \"H_I\": [[[0, 1]]]}", &h) != MQSP_OK);

  // Target build.
  char* target = nullptr;
  char* grid = nullptr;
  CHECK(mqsp_target_build("{\"alphaRT\": 0.8, \"betaIT\": 0.4}", &target, &grid, nullptr) == MQSP_OK);
  CHECK(contains(target, "window1"));
  CHECK(contains(grid, "theta1"));
  mqsp_string_free(target);
  mqsp_string_free(grid);

  // Estimates.
  char* table = nullptr;
  char* csv = nullptr;
  CHECK(mqsp_estimate("{\"preset\": \"strong\"}", &table, &csv, nullptr) == MQSP_OK);
  CHECK(contains(table, "5408"));
  CHECK(contains(csv, "Q_total"));
  mqsp_string_free(table);
  mqsp_string_free(csv);
  CHECK(mqsp_estimate("{\"preset\": \"medium\"}", &table, nullptr, nullptr) == MQSP_ERR_CONFIG);
  CHECK(mqsp_estimate("{\"alphaT\": 1, \"betaT\": 1, \"eps\": 0.9}", &table, nullptr, nullptr) != MQSP_OK);

  // Verification on a fast subset.
  char* vreport = nullptr;
  char* summary = nullptr;
  int passed = 0;
  CHECK(mqsp_verify("resources", 1, 0.0, &vreport, &summary, &passed) == MQSP_OK);
  CHECK(passed == 1);
  CHECK(contains(summary, "PASS"));
  mqsp_string_free(vreport);
  mqsp_string_free(summary);
  CHECK(mqsp_verify("nonsense", 1, 0.0, &vreport, &summary, &passed) == MQSP_ERR_CONFIG);

  if (failures == 0) std::printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
